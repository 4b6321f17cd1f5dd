#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace xgw {

enum class Role { kSystem, kUser, kAssistant };

// Which prompt-building step produced a message. Metadata only: it is not
// sent on the wire and does not enter the fingerprint.
enum class MessageStage { kUnspecified, kPersona, kKnowledge, kExample, kData, kInstruction, kJudge };

std::string_view to_string(Role role);
std::string_view to_string(MessageStage stage);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
  MessageStage stage = MessageStage::kUnspecified;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

enum class CaseId { kCase1 = 1, kCase2, kCase3, kCase4, kCase5 };

std::string_view to_string(CaseId id);
std::optional<CaseId> parse_case_id(std::string_view text);  // "case4" or "4"
// Cases 3 and 4 are answered by a language model; the others are the data text.
bool requires_generation(CaseId id);

struct PromptBundle {
  CaseId case_id = CaseId::kCase4;
  std::vector<ChatMessage> messages;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

// Stable 64-bit FNV-1a fingerprint over roles and contents, as 16 hex digits.
std::string fingerprint(const std::vector<ChatMessage>& messages);

// [{"role": ..., "content": ...}, ...]
nlohmann::json messages_to_json(const std::vector<ChatMessage>& messages,
                                bool include_stage = false);

}  // namespace xgw
