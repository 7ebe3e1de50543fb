#include "scarlet/prompts.hpp"

#include <cctype>
#include <unordered_set>

namespace scarlet::prompts {

namespace {

constexpr std::string_view kRankTemplateHead =
    "Please first provide the answer based on the passages that you have ranked in utility "
    "and then write the ranked passages in descending order of utility in answering the "
    "question, like \"My rank: [i]>[j]>...>[k]\".\n\n";

constexpr std::string_view kSynthesisHead =
    "You are a strong expert of data synthesis. Below, I will provide the context, the "
    "description and an example of the target task. Your task is to generate a piece of data "
    "for the target task based on the given context. The sections marked with ====xxx "
    "begins==== and ====xxx ends==== indicate the start and end of each respective part. "
    "Please note that the data you generate must meet the following criteria:\n"
    "1. Correctness, which must be logically correct and factually correct.\n"
    "2. Faithfulness, which must be faithful to the context.\n"
    "3. Quality, which must be thoughtful and sophisticated, ideally based on multiple "
    "paragraphs where applicable.\n\n"
    "Please note that the generated data should follow this specific format:\n"
    "====New data begins====\nInput:\nReference output:\n====New data ends====\n\n";

constexpr std::string_view kNoiseHead =
    "You are a strong expert of data processing. You are tasked with data augmentation to "
    "generate noisy data to enhance training robustness. Below, I will provide you with a "
    "piece of data, including task description, input, and ground truth. Then I will provide "
    "you with the context containing the necessary information to solve the input. You need "
    "to deeply understand the data and the context, and finally generate a passage which is a "
    "variant of one passage of the context. The generated passage needs to be semantically "
    "relevant while providing no practical effect in solving the input.\n\n";

constexpr std::string_view kNoiseTail =
    "Please ensure that the generated passage matches the length of the passages in the "
    "context and is a modified version of its original passage. And the generated passage "
    "must follow the format, which is marked with ====Generated passage begins==== and "
    "====Generated passage ends==== at its start and end.\n";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<std::string_view> between(std::string_view text, std::string_view begin,
                                        std::string_view end) {
  auto b = text.find(begin);
  if (b == std::string_view::npos) return std::nullopt;
  b += begin.size();
  auto e = text.find(end, b);
  if (e == std::string_view::npos) return std::nullopt;
  return text.substr(b, e - b);
}

std::string render_numbered(std::span<const Passage> passages) {
  std::string out;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    if (i) out.push_back('\n');
    out += "[" + std::to_string(i + 1) + "] " + passages[i].text;
  }
  return out;
}

std::string render_numbered(std::span<const std::string> texts) {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i) out.push_back('\n');
    out += "[" + std::to_string(i + 1) + "] " + texts[i];
  }
  return out;
}

std::vector<std::string> parse_numbered(std::string_view block) {
  // Entries start at "[<n>] " where <n> is the next expected index.
  std::vector<std::string> out;
  std::size_t expected = 1;
  std::size_t pos = 0;
  std::size_t text_start = std::string_view::npos;
  auto marker = [&](std::size_t n) { return "[" + std::to_string(n) + "] "; };
  while (true) {
    std::string m = marker(expected);
    std::size_t at = std::string_view::npos;
    for (std::size_t s = pos; s < block.size(); ++s) {
      if ((s == 0 || block[s - 1] == '\n') && block.substr(s, m.size()) == m) {
        at = s;
        break;
      }
    }
    if (text_start != std::string_view::npos) {
      std::size_t stop = at == std::string_view::npos ? block.size() : at;
      out.emplace_back(trim(block.substr(text_start, stop - text_start)));
    }
    if (at == std::string_view::npos) break;
    text_start = at + m.size();
    pos = text_start;
    ++expected;
  }
  return out;
}

std::string render_rank(std::span<const Passage> context, std::string_view query) {
  std::string out(kRankTemplateHead);
  out += "Context: " + render_numbered(context) + "\n\n";
  out += "Question: " + std::string(query) + "\n";
  return out;
}

std::string render_synthesis(std::span<const Passage> context, const TaskSpec& task) {
  std::string out(kSynthesisHead);
  out += "====Context begins====\n" + render_numbered(context) + "\n====Context ends====\n\n";
  out += "====Target task description begins====\n" + task.task_instruction +
         "\n====Target task description ends====\n\n";
  out += "====Target task example begins====\nInput: " + task.example_input +
         "\nReference output: " + task.example_output + "\n====Target task example ends====\n\n";
  out += "Please ensure that your output matches the instructions above.\n";
  return out;
}

std::string render_filter(const SyntheticExample& example, std::span<const Passage> context,
                          const TaskSpec& task) {
  const std::string& name = task.task_id;
  std::string out =
      "You are tasked with checking whether the following synthetic data of " + name +
      " task is logically correct and formatted correctly. The data consists of five parts: "
      "task description, example, input, output, source passages. The input and output of the "
      "synthetic data are based on the source passages. And a reasonable example of " +
      name +
      " task is provided, note that it is not based on source passages. Please check the "
      "following:\n"
      "1. Logical Correctness: Check whether the output correctly solves the input based on "
      "the source passages.\n"
      "2. Format Correctness: Check whether the input and output of the synthetic data conform "
      "to the correct format presented in the task description and the example.\n\n";
  out += "Task description: " + task.task_instruction + "\n\n";
  out += "Example:\nInput: " + task.example_input + "\nOutput: " + task.example_output + "\n\n";
  out += "Now, please check the following synthetic data based on source passages:\n\n";
  out += "Input: " + example.input + "\n";
  out += "Output: " + example.ground_truth + "\n";
  out += "Source passages: " + render_numbered(context) + "\n\n";
  out +=
      "Please note that if the above synthetic data basically meets the requirements, output "
      "\"[YES]\", otherwise output \"[NO]\".\n";
  return out;
}

std::string render_noise(const SyntheticExample& example, std::span<const Passage> context) {
  std::string out(kNoiseHead);
  out += "Data:\nInput: " + example.input + "\nGround truth: " + example.ground_truth + "\n\n";
  out += "Context: " + render_numbered(context) + "\n\n";
  out += kNoiseTail;
  return out;
}

std::pair<std::string, std::string> parse_synthesis_reply(std::string_view reply) {
  // Last begin marker that has an end marker after it.
  std::optional<std::string_view> block;
  for (auto b = reply.rfind(kNewDataBegin); b != std::string_view::npos;
       b = b == 0 ? std::string_view::npos : reply.rfind(kNewDataBegin, b - 1)) {
    auto rest = reply.substr(b + kNewDataBegin.size());
    auto e = rest.find(kNewDataEnd);
    if (e != std::string_view::npos) {
      block = rest.substr(0, e);
      break;
    }
  }
  if (!block) throw Error(ErrorCode::SynthesisParseError, "missing new-data markers");

  constexpr std::string_view kInput = "Input:";
  constexpr std::string_view kOutput = "Reference output:";
  auto in = block->find(kInput);
  auto out = block->find(kOutput);
  if (in == std::string_view::npos || out == std::string_view::npos || out < in)
    throw Error(ErrorCode::SynthesisParseError, "missing Input or Reference output field");
  auto input = trim(block->substr(in + kInput.size(), out - in - kInput.size()));
  auto output = trim(block->substr(out + kOutput.size()));
  if (input.empty()) throw Error(ErrorCode::SynthesisParseError, "empty Input field");
  if (output.empty()) throw Error(ErrorCode::SynthesisParseError, "empty Reference output field");
  return {std::string(input), std::string(output)};
}

FilterReply parse_filter_reply(std::string_view reply) {
  bool yes = reply.find("[YES]") != std::string_view::npos;
  bool no = reply.find("[NO]") != std::string_view::npos;
  if (no) return FilterReply::no;
  if (yes) return FilterReply::yes;
  return FilterReply::unparseable;
}

std::optional<std::string> parse_noise_reply(std::string_view reply) {
  auto body = between(reply, kNoiseBegin, kNoiseEnd);
  if (!body) return std::nullopt;
  auto t = trim(*body);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

std::vector<std::size_t> parse_rank_line(std::string_view text, std::size_t k) {
  auto fail = [&](const std::string& why) -> RankParseError {
    return RankParseError(why, std::string(text));
  };
  if (k == 0) throw fail("k must be >= 1");
  auto at = text.rfind(kRankPrefix);
  if (at == std::string_view::npos) throw fail("no rank line");
  auto rest = text.substr(at + kRankPrefix.size());

  std::vector<std::size_t> ranks;
  std::unordered_set<std::size_t> seen;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= rest.size() || rest[i] != '[') break;
    ++i;
    std::size_t start = i;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    if (i == start || i >= rest.size() || rest[i] != ']') throw fail("malformed rank entry");
    auto idx = std::stoull(std::string(rest.substr(start, i - start)));
    ++i;
    if (idx < 1 || idx > k) throw fail("rank index " + std::to_string(idx) + " out of range");
    if (!seen.insert(idx).second) throw fail("duplicate rank index " + std::to_string(idx));
    ranks.push_back(idx);
    skip_ws();
    if (i < rest.size() && rest[i] == '>') {
      ++i;
      continue;
    }
    break;
  }
  if (ranks.empty()) throw fail("empty rank line");
  return ranks;
}

}  // namespace scarlet::prompts
