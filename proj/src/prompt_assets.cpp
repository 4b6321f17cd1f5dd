#include "xgw/prompt_assets.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {
namespace {

using Rows = std::vector<std::pair<std::string, std::string>>;

Rows parse_two_column_table(std::istream& in, std::string_view table, std::string_view first,
                            std::string_view second) {
  Rows rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (header) {
      if (f.size() != 2 || f[0] != first || f[1] != second) {
        throw Error(ErrorCode::kParse, std::string(table) + " row " + std::to_string(line_no) +
                                           ": expected header '" + std::string(first) + "\\t" +
                                           std::string(second) + "'");
      }
      header = false;
      continue;
    }
    if (f.size() != 2 || trim(f[0]).empty() || trim(f[1]).empty()) {
      throw Error(ErrorCode::kParse, std::string(table) + " row " + std::to_string(line_no) +
                                         ": expected two non-empty columns");
    }
    rows.emplace_back(unescape_field(f[0]), unescape_field(f[1]));
  }
  return rows;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot open prompt asset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::string(trim(buffer.str()));
}

}  // namespace

PromptAssetPaths PromptAssetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "persona.txt", dir / "qa_pairs.tsv", dir / "few_shot.tsv", dir / "instruction.txt"};
}

std::vector<QaPair> parse_qa_table(std::istream& in, std::vector<std::string>* warnings) {
  std::vector<QaPair> pairs;
  std::set<std::string> seen;
  for (auto& [q, a] : parse_two_column_table(in, "qa_pairs", "question", "answer")) {
    if (!seen.insert(q).second && warnings) {
      warnings->push_back("duplicate question kept: " + q);
    }
    pairs.push_back({std::move(q), std::move(a)});
  }
  return pairs;
}

std::vector<FewShotExample> parse_few_shot_table(std::istream& in) {
  std::vector<FewShotExample> examples;
  for (auto& [text, output] :
       parse_two_column_table(in, "few_shot", "synthesized_text", "example_output")) {
    examples.push_back({std::move(text), std::move(output)});
  }
  return examples;
}

PromptAssets load_prompt_assets(const PromptAssetPaths& paths) {
  PromptAssets assets;
  assets.persona = read_text(paths.persona);
  assets.instruction = read_text(paths.instruction);
  {
    std::ifstream in(paths.qa_pairs);
    if (!in) throw Error(ErrorCode::kConfiguration, "cannot open " + paths.qa_pairs.string());
    assets.qa_pairs = parse_qa_table(in, &assets.warnings);
  }
  {
    std::ifstream in(paths.few_shot);
    if (!in) throw Error(ErrorCode::kConfiguration, "cannot open " + paths.few_shot.string());
    assets.few_shot = parse_few_shot_table(in);
  }
  for (const std::string& w : assets.warnings) warn(w);
  return assets;
}

}  // namespace xgw
