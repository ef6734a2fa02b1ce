#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xsams {

enum class ErrorCode {
  XmlSyntax,
  UnknownOriginKind,
  MissingRequiredField,
  DuplicateIdentifier,
  UnresolvedReference,
  MultipleVersionMembership,
  QuerySyntax,
  TypeMismatch,
  AmbiguousMatch,
  SpeciesMismatch,
  UnmatchedReferencedState,
  MultipleRootOrigins,
  InvalidDocument,
  StorageFailure,
  UnknownIdentifier,
  NotReexecutable,
  NodeUnavailable,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception. `subject` carries the
// offending identifier, element name or source position when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace xsams
