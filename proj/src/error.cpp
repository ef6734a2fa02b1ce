#include "xsams/error.hpp"

namespace xsams {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::XmlSyntax: return "XmlSyntax";
    case ErrorCode::UnknownOriginKind: return "UnknownOriginKind";
    case ErrorCode::MissingRequiredField: return "MissingRequiredField";
    case ErrorCode::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorCode::UnresolvedReference: return "UnresolvedReference";
    case ErrorCode::MultipleVersionMembership: return "MultipleVersionMembership";
    case ErrorCode::QuerySyntax: return "QuerySyntax";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::SpeciesMismatch: return "SpeciesMismatch";
    case ErrorCode::UnmatchedReferencedState: return "UnmatchedReferencedState";
    case ErrorCode::MultipleRootOrigins: return "MultipleRootOrigins";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::NotReexecutable: return "NotReexecutable";
    case ErrorCode::NodeUnavailable: return "NodeUnavailable";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) +
                         (subject.empty() ? "" : " " + subject) + ": " +
                         message),
      code_(code),
      subject_(std::move(subject)) {}

}  // namespace xsams
