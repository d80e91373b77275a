#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gradlens/analysis.hpp"

namespace gradlens {

enum class ChartKind { Line, Dumbbell, GroupedBar, DistributionPair };
enum class ChartFormat { Csv, Json, Svg };

std::string_view to_string(ChartKind kind) noexcept;
std::optional<ChartKind> parse_chart_kind(std::string_view text) noexcept;
std::string_view to_string(ChartFormat format) noexcept;
std::optional<ChartFormat> parse_chart_format(std::string_view text) noexcept;

// Line <-> series points, Dumbbell <-> per-institution evenness triples,
// GroupedBar <-> gap rows, DistributionPair <-> two distributions.
using ChartPayload = std::variant<std::vector<SeriesPoint>, std::vector<EvennessTriple>,
                                  std::vector<GapRow>, gradlens::DistributionPair>;

struct ChartSpec {
  ChartKind kind = ChartKind::Line;
  std::string title;
  ChartPayload payload;
  ChartFormat format = ChartFormat::Svg;
};

/// Renders the chart. CSV and JSON are exact data dumps; SVG is a static
/// drawing whose values, axis labels and legend are all <text> elements.
/// Throws EmptyPayload for an empty payload and InvalidFilter when the kind
/// does not match the payload.
std::string emit_chart(const ChartSpec& spec);

/// Reads a CSV or JSON dump produced by emit_chart back into a payload.
ChartPayload parse_chart_payload(ChartKind kind, ChartFormat format, std::string_view text);

}  // namespace gradlens
