#pragma once

#include <string>
#include <string_view>

#include "ctxscope/context.hpp"

namespace ctxscope {

enum class ReportFormat { Json, Markdown, Text };

ReportFormat parse_report_format(std::string_view name);

inline constexpr std::string_view kReportSchema = "ctxscope-report";
inline constexpr int kReportVersion = 1;

/// Stable, pretty-printed JSON. Rationals are "num/den" strings.
std::string report_to_json(const AnalysisReport& report);

/// Parses a report document and checks the schema name, version and the fields
/// the renderers rely on. Throws ErrorKind::Input on any mismatch.
void validate_report_json(std::string_view json_text);

/// Renders a report document; Json re-emits it in canonical form.
std::string render_report(std::string_view json_text, ReportFormat format);

}  // namespace ctxscope
