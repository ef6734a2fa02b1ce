#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xsams/model.hpp"

namespace xsams {

// Rule codes reported by validate(). Errors make a document invalid;
// warnings are advisory.
namespace rule {
// errors
inline constexpr std::string_view kMissingRequiredField = "MissingRequiredField";
inline constexpr std::string_view kNodeOriginWithSubOrigins = "NodeOriginWithSubOrigins";
inline constexpr std::string_view kProcessorWithoutSubOrigins = "ProcessorWithoutSubOrigins";
inline constexpr std::string_view kUnexpectedQuery = "UnexpectedQuery";
inline constexpr std::string_view kGlobalVersionWithMultipleOrigins = "GlobalVersionWithMultipleOrigins";
inline constexpr std::string_view kGlobalVersionWithReferences = "GlobalVersionWithReferences";
inline constexpr std::string_view kMultipleVersionMembership = "MultipleVersionMembership";
inline constexpr std::string_view kDuplicateIdentifier = "DuplicateIdentifier";
inline constexpr std::string_view kUnresolvedReference = "UnresolvedReference";
inline constexpr std::string_view kWrongReferenceKind = "WrongReferenceKind";
inline constexpr std::string_view kStateSpeciesMismatch = "StateSpeciesMismatch";
inline constexpr std::string_view kInvalidTimestamp = "InvalidTimestamp";
inline constexpr std::string_view kLengthMismatch = "LengthMismatch";
inline constexpr std::string_view kInvalidSource = "InvalidSource";
inline constexpr std::string_view kInvalidSpecies = "InvalidSpecies";
// warnings
inline constexpr std::string_view kVersionOrphan = "VersionOrphan";
inline constexpr std::string_view kPublicationAfterExtraction = "PublicationAfterExtraction";
inline constexpr std::string_view kSourceWithoutAuthors = "SourceWithoutAuthors";
inline constexpr std::string_view kNoOrigin = "NoOrigin";
}  // namespace rule

struct Finding {
  std::string code;
  std::string subject;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool valid() const { return errors.empty(); }
  bool has_error(std::string_view code) const;
  bool has_warning(std::string_view code) const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate(const XsamsDocument& doc);

// One line per finding, errors first, each group ordered by (code, subject),
// followed by a summary line. An empty report renders as
// "OK: 0 errors, 0 warnings".
std::string explain(const ValidationReport& report);

}  // namespace xsams
