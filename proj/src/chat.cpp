#include "xgw/chat.hpp"

#include <cstdint>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace xgw {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

std::string_view to_string(MessageStage stage) {
  switch (stage) {
    case MessageStage::kUnspecified:
      return "unspecified";
    case MessageStage::kPersona:
      return "persona";
    case MessageStage::kKnowledge:
      return "knowledge";
    case MessageStage::kExample:
      return "example";
    case MessageStage::kData:
      return "data";
    case MessageStage::kInstruction:
      return "instruction";
    case MessageStage::kJudge:
      return "judge";
  }
  return "unspecified";
}

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::kCase1:
      return "case1";
    case CaseId::kCase2:
      return "case2";
    case CaseId::kCase3:
      return "case3";
    case CaseId::kCase4:
      return "case4";
    case CaseId::kCase5:
      return "case5";
  }
  return "case4";
}

std::optional<CaseId> parse_case_id(std::string_view text) {
  if (text.size() == 5 && text.substr(0, 4) == "case") text.remove_prefix(4);
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '5') {
    return static_cast<CaseId>(text[0] - '0');
  }
  return std::nullopt;
}

bool requires_generation(CaseId id) { return id == CaseId::kCase3 || id == CaseId::kCase4; }

std::string fingerprint(const std::vector<ChatMessage>& messages) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::string_view bytes) {
    for (const char c : bytes) {
      hash ^= static_cast<unsigned char>(c);
      hash *= 0x100000001b3ULL;
    }
    hash ^= 0xff;  // field separator
    hash *= 0x100000001b3ULL;
  };
  for (const ChatMessage& m : messages) {
    mix(to_string(m.role));
    mix(m.content);
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

nlohmann::json messages_to_json(const std::vector<ChatMessage>& messages, bool include_stage) {
  nlohmann::json out = nlohmann::json::array();
  for (const ChatMessage& m : messages) {
    nlohmann::json entry{{"role", to_string(m.role)}, {"content", m.content}};
    if (include_stage) entry["stage"] = to_string(m.stage);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace xgw
