#include "sot/error.hpp"

namespace sot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyMessages: return "EmptyMessages";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::Storage: return "Storage";
    case ErrorCode::EmptyCondition: return "EmptyCondition";
    case ErrorCode::NoParseableSyzygy: return "NoParseableSyzygy";
    case ErrorCode::Unparseable: return "Unparseable";
    case ErrorCode::NotCanonicalizable: return "NotCanonicalizable";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::BadGold: return "BadGold";
    case ErrorCode::MixedStrategies: return "MixedStrategies";
    case ErrorCode::UnevenSeedGroups: return "UnevenSeedGroups";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::MissingRecords: return "MissingRecords";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
  }
  return "Unknown";
}

}  // namespace sot
