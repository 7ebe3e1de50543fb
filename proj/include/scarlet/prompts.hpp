#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scarlet/core.hpp"

namespace scarlet::prompts {

inline constexpr std::string_view kNewDataBegin = "====New data begins====";
inline constexpr std::string_view kNewDataEnd = "====New data ends====";
inline constexpr std::string_view kNoiseBegin = "====Generated passage begins====";
inline constexpr std::string_view kNoiseEnd = "====Generated passage ends====";
inline constexpr std::string_view kRankPrefix = "My rank:";

/// "[1] text\n[2] text..." (1-based).
std::string render_numbered(std::span<const Passage> passages);
std::string render_numbered(std::span<const std::string> texts);

/// Inverse of render_numbered; used by the offline mock to read prompts.
std::vector<std::string> parse_numbered(std::string_view block);

std::string render_rank(std::span<const Passage> context, std::string_view query);

std::string render_synthesis(std::span<const Passage> context, const TaskSpec& task);

std::string render_filter(const SyntheticExample& example, std::span<const Passage> context,
                          const TaskSpec& task);

std::string render_noise(const SyntheticExample& example, std::span<const Passage> context);

/// Extracts Input / Reference output from the last complete new-data block.
/// Throws SynthesisParseError on missing markers or empty fields.
std::pair<std::string, std::string> parse_synthesis_reply(std::string_view reply);

enum class FilterReply { yes, no, unparseable };

/// [YES] without [NO] is yes, any [NO] is no, everything else unparseable.
FilterReply parse_filter_reply(std::string_view reply);

/// Text between the generated-passage markers, trimmed; nullopt when absent
/// or empty.
std::optional<std::string> parse_noise_reply(std::string_view reply);

/// Parses the last "My rank: [i]>[j]>..." line into 1-based indices. Any
/// duplicate-free subset of 1..k is accepted. Throws RankParseError.
std::vector<std::size_t> parse_rank_line(std::string_view text, std::size_t k);

/// Substring strictly between the first `begin` and the next `end` after it.
std::optional<std::string_view> between(std::string_view text, std::string_view begin,
                                        std::string_view end);

std::string_view trim(std::string_view s);

}  // namespace scarlet::prompts
