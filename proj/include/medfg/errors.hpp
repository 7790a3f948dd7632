#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medfg {

enum class ErrorCode {
  // graph core
  MissingRequiredProperty,
  TypeMismatch,
  DuplicateEventClass,
  UnknownNode,
  EndpointKindViolation,
  // ingestion
  HeaderMismatch,
  BadTimestamp,
  NoEntities,
  RaggedRow,
  EmptyActivity,
  BadQuoting,
  // mimic adapter
  MissingColumn,
  MissingAdmitTime,
  NegativeStay,
  UnknownItemId,
  EndBeforeStart,
  UnresolvedForeignKey,
  // builder / dfg
  EmptyLog,
  UnknownEntityType,
  UnknownCase,
  InstanceLevelNotFilterable,
  // export
  MissingColor,
  MalformedDump,
  // synth / cli / config
  BadRate,
  BadConfig,
  FileNotFound,
  BadFlag,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingRequiredProperty: return "MissingRequiredProperty";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DuplicateEventClass: return "DuplicateEventClass";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EndpointKindViolation: return "EndpointKindViolation";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::NoEntities: return "NoEntities";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::EmptyActivity: return "EmptyActivity";
    case ErrorCode::BadQuoting: return "BadQuoting";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MissingAdmitTime: return "MissingAdmitTime";
    case ErrorCode::NegativeStay: return "NegativeStay";
    case ErrorCode::UnknownItemId: return "UnknownItemId";
    case ErrorCode::EndBeforeStart: return "EndBeforeStart";
    case ErrorCode::UnresolvedForeignKey: return "UnresolvedForeignKey";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::UnknownEntityType: return "UnknownEntityType";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::InstanceLevelNotFilterable:
      return "InstanceLevelNotFilterable";
    case ErrorCode::MissingColor: return "MissingColor";
    case ErrorCode::MalformedDump: return "MalformedDump";
    case ErrorCode::BadRate: return "BadRate";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::BadFlag: return "BadFlag";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace medfg
