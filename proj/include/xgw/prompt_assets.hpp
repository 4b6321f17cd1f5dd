#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace xgw {

struct QaPair {
  std::string question;
  std::string answer;
};

struct FewShotExample {
  std::string synthesized_text;
  std::string example_output;
};

struct PromptAssets {
  std::string persona;
  std::vector<QaPair> qa_pairs;
  std::vector<FewShotExample> few_shot;
  std::string instruction;
  std::vector<std::string> warnings;
};

struct PromptAssetPaths {
  std::filesystem::path persona;
  std::filesystem::path qa_pairs;
  std::filesystem::path few_shot;
  std::filesystem::path instruction;

  // persona.txt, qa_pairs.tsv, few_shot.tsv, instruction.txt
  static PromptAssetPaths in_directory(const std::filesystem::path& dir);
};

// Tab-separated tables with a header row ("question<TAB>answer" and
// "synthesized_text<TAB>example_output"); fields use backslash escapes.
// Malformed rows are a parse error naming the line. Duplicate questions are
// kept in order and reported in `warnings`.
std::vector<QaPair> parse_qa_table(std::istream& in, std::vector<std::string>* warnings = nullptr);
std::vector<FewShotExample> parse_few_shot_table(std::istream& in);

PromptAssets load_prompt_assets(const PromptAssetPaths& paths);

}  // namespace xgw
