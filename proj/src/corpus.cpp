#include "scorepred/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "scorepred/cf_model.hpp"
#include "scorepred/rng.hpp"

namespace scorepred {

namespace {

constexpr std::string_view kInteractionHeader =
    "user_id,question_id,section,correct,elapsed_ms,time_limit_ms,timestamp";
constexpr std::string_view kLabelHeader =
    "user_id,score_total,score_lc,score_rc,report_time";

constexpr std::int64_t kBaseTimestampMs = 1'700'000'000'000;
constexpr std::int64_t kUserSpacingMs = 86'400'000;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_int_field(const std::string& s, long line_no, const char* field) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorKind::MalformedRow,
         std::string("line ") + std::to_string(line_no) + ": bad integer in " + field +
             ": '" + s + "'",
         line_no);
  return v;
}

void check_id(const std::string& id, const char* what) {
  if (id.empty()) fail(ErrorKind::InvalidArgument, std::string(what) + " is empty");
  if (id.find_first_of(",\n\r") != std::string::npos)
    fail(ErrorKind::InvalidArgument,
         std::string(what) + " contains a comma or newline: '" + id + "'");
}

Interaction validate_interaction(Interaction it, long line_no) {
  if (it.elapsed_ms < 0)
    fail(ErrorKind::MalformedRow,
         "line " + std::to_string(line_no) + ": elapsed_ms < 0", line_no);
  if (it.time_limit_ms <= 0)
    fail(ErrorKind::MalformedRow,
         "line " + std::to_string(line_no) + ": time_limit_ms <= 0", line_no);
  return it;
}

std::vector<Interaction> parse_interactions_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    fail(ErrorKind::MissingColumn, "empty file, expected header row");
  if (strip_cr(line) != kInteractionHeader)
    fail(ErrorKind::MissingColumn,
         "header mismatch, expected '" + std::string(kInteractionHeader) + "'");

  std::vector<Interaction> rows;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 7)
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": expected 7 fields, got " +
               std::to_string(fields.size()),
           line_no);
    Interaction it;
    it.user_id = fields[0];
    it.question_id = fields[1];
    if (fields[2] == "LC") {
      it.section = Section::LC;
    } else if (fields[2] == "RC") {
      it.section = Section::RC;
    } else {
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": bad section '" + fields[2] + "'",
           line_no);
    }
    if (fields[3] == "1") {
      it.correct = true;
    } else if (fields[3] == "0") {
      it.correct = false;
    } else {
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": bad correct flag '" + fields[3] + "'",
           line_no);
    }
    it.elapsed_ms = parse_int_field(fields[4], line_no, "elapsed_ms");
    it.time_limit_ms = parse_int_field(fields[5], line_no, "time_limit_ms");
    it.timestamp = parse_int_field(fields[6], line_no, "timestamp");
    rows.push_back(validate_interaction(std::move(it), line_no));
  }
  return rows;
}

std::vector<Interaction> parse_interactions_jsonl(std::istream& is) {
  std::vector<Interaction> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    for (const char* key : {"user_id", "question_id", "section", "correct",
                            "elapsed_ms", "time_limit_ms", "timestamp"})
      if (!j.contains(key))
        fail(ErrorKind::MissingColumn,
             "line " + std::to_string(line_no) + ": missing field '" + key + "'",
             line_no);
    try {
      Interaction it;
      it.user_id = j.at("user_id").get<std::string>();
      it.question_id = j.at("question_id").get<std::string>();
      it.section = section_from_name(j.at("section").get<std::string>());
      it.correct = j.at("correct").get<bool>();
      it.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
      it.time_limit_ms = j.at("time_limit_ms").get<std::int64_t>();
      it.timestamp = j.at("timestamp").get<std::int64_t>();
      rows.push_back(validate_interaction(std::move(it), line_no));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return is;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace

const char* section_name(Section s) { return s == Section::LC ? "LC" : "RC"; }

Section section_from_name(std::string_view name) {
  if (name == "LC") return Section::LC;
  if (name == "RC") return Section::RC;
  fail(ErrorKind::Parse, "bad section '" + std::string(name) + "'");
}

std::vector<Interaction> parse_interactions(const std::filesystem::path& path,
                                            FileFormat format) {
  auto is = open_input(path);
  return format == FileFormat::Csv ? parse_interactions_csv(is)
                                   : parse_interactions_jsonl(is);
}

void write_interactions(const std::vector<Interaction>& rows,
                        const std::filesystem::path& path, FileFormat format) {
  auto os = open_output(path);
  if (format == FileFormat::Csv) {
    os << kInteractionHeader << '\n';
    for (const auto& it : rows) {
      check_id(it.user_id, "user_id");
      check_id(it.question_id, "question_id");
      os << it.user_id << ',' << it.question_id << ',' << section_name(it.section)
         << ',' << (it.correct ? '1' : '0') << ',' << it.elapsed_ms << ','
         << it.time_limit_ms << ',' << it.timestamp << '\n';
    }
  } else {
    for (const auto& it : rows) {
      nlohmann::ordered_json j;
      j["user_id"] = it.user_id;
      j["question_id"] = it.question_id;
      j["section"] = section_name(it.section);
      j["correct"] = it.correct;
      j["elapsed_ms"] = it.elapsed_ms;
      j["time_limit_ms"] = it.time_limit_ms;
      j["timestamp"] = it.timestamp;
      os << j.dump() << '\n';
    }
  }
  if (!os) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<ScoreLabel> parse_score_labels(const std::filesystem::path& path) {
  auto is = open_input(path);
  std::string line;
  if (!std::getline(is, line))
    fail(ErrorKind::MissingColumn, "empty file, expected header row");
  if (strip_cr(line) != kLabelHeader)
    fail(ErrorKind::MissingColumn,
         "header mismatch, expected '" + std::string(kLabelHeader) + "'");

  std::vector<ScoreLabel> labels;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 5)
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": expected 5 fields, got " +
               std::to_string(fields.size()),
           line_no);
    ScoreLabel label;
    label.user_id = fields[0];
    label.score_total = static_cast<int>(parse_int_field(fields[1], line_no, "score_total"));
    if (!fields[2].empty())
      label.score_lc = static_cast<int>(parse_int_field(fields[2], line_no, "score_lc"));
    if (!fields[3].empty())
      label.score_rc = static_cast<int>(parse_int_field(fields[3], line_no, "score_rc"));
    label.report_time = parse_int_field(fields[4], line_no, "report_time");
    if (label.score_total < 0 || label.score_total > 990)
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": score_total out of [0,990]", line_no);
    for (const auto& section_score : {label.score_lc, label.score_rc})
      if (section_score && (*section_score < 0 || *section_score > 495))
        fail(ErrorKind::MalformedRow,
             "line " + std::to_string(line_no) + ": section score out of [0,495]",
             line_no);
    if (label.score_lc && label.score_rc &&
        *label.score_lc + *label.score_rc != label.score_total)
      fail(ErrorKind::MalformedRow,
           "line " + std::to_string(line_no) + ": score_lc + score_rc != score_total",
           line_no);
    labels.push_back(std::move(label));
  }
  return labels;
}

void write_score_labels(const std::vector<ScoreLabel>& labels,
                        const std::filesystem::path& path) {
  auto os = open_output(path);
  os << kLabelHeader << '\n';
  for (const auto& label : labels) {
    check_id(label.user_id, "user_id");
    os << label.user_id << ',' << label.score_total << ',';
    if (label.score_lc) os << *label.score_lc;
    os << ',';
    if (label.score_rc) os << *label.score_rc;
    os << ',' << label.report_time << '\n';
  }
  if (!os) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

namespace {

std::string padded_id(char prefix, int index, int width) {
  std::string digits = std::to_string(index);
  std::string out(1, prefix);
  out.append(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0');
  out += digits;
  return out;
}

int affine_section_score(double mean_prob, double phi_a) {
  double unit = (mean_prob - phi_a) / (1.0 - phi_a);
  double raw = 495.0 * unit;
  return round_to_multiple_of_5(std::clamp(raw, 0.0, 495.0));
}

}  // namespace

SynthData generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n_users <= 0 || cfg.n_questions <= 0 || cfg.latent_dim <= 0)
    fail(ErrorKind::InvalidConfig, "n_users, n_questions, latent_dim must be positive");
  if (!(cfg.noise >= 0.0 && cfg.noise < 0.5))
    fail(ErrorKind::InvalidConfig, "noise must lie in [0, 0.5)");
  if (cfg.time_limit_ms <= 0) fail(ErrorKind::InvalidConfig, "time_limit_ms must be positive");
  if (!(cfg.phi_a >= 0.0 && cfg.phi_a < 1.0) || cfg.phi_c <= 0.0)
    fail(ErrorKind::InvalidConfig, "phi parameters out of range");

  const int n = cfg.n_users;
  const int m = cfg.n_questions;
  const int k = cfg.latent_dim;
  const PhiParams phi{cfg.phi_a, cfg.phi_b, cfg.phi_c};

  SynthData data;
  data.truth.latent_dim = k;
  data.truth.phi_a = cfg.phi_a;
  data.truth.phi_b = cfg.phi_b;
  data.truth.phi_c = cfg.phi_c;

  const int user_width = std::max<int>(4, static_cast<int>(std::to_string(n - 1).size()));
  const int question_width = std::max<int>(4, static_cast<int>(std::to_string(m - 1).size()));
  data.user_ids.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) data.user_ids.push_back(padded_id('u', u, user_width));
  data.question_ids.reserve(static_cast<std::size_t>(m));
  data.question_sections.reserve(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    data.question_ids.push_back(padded_id('q', q, question_width));
    data.question_sections.push_back(q % 2 == 0 ? Section::LC : Section::RC);
  }

  Rng plant(derive_seed(cfg.seed, "synth-plant"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  data.truth.user_vecs.resize(static_cast<std::size_t>(n) * k);
  for (double& x : data.truth.user_vecs) x = plant.gaussian() * scale;
  data.truth.question_vecs.resize(static_cast<std::size_t>(m) * k);
  for (double& x : data.truth.question_vecs) x = plant.gaussian() * scale;

  // Noise-free skill probabilities drive the true scores; the flipped
  // probabilities drive the observed correctness draws.
  std::vector<double> raw_prob(static_cast<std::size_t>(n) * m);
  data.truth.correct_prob.resize(raw_prob.size());
  for (int u = 0; u < n; ++u) {
    const double* lu = data.truth.user_vecs.data() + static_cast<std::size_t>(u) * k;
    for (int q = 0; q < m; ++q) {
      const double* rq = data.truth.question_vecs.data() + static_cast<std::size_t>(q) * k;
      double x = 0.0;
      for (int d = 0; d < k; ++d) x += lu[d] * rq[d];
      double p = correctness_prob(x, phi);
      raw_prob[static_cast<std::size_t>(u) * m + q] = p;
      data.truth.correct_prob[static_cast<std::size_t>(u) * m + q] =
          (1.0 - cfg.noise) * p + cfg.noise * (1.0 - p);
    }
  }

  data.truth.true_score_total.resize(static_cast<std::size_t>(n));
  data.truth.true_score_lc.resize(static_cast<std::size_t>(n));
  data.truth.true_score_rc.resize(static_cast<std::size_t>(n));

  std::vector<int> question_order(static_cast<std::size_t>(m));
  for (int u = 0; u < n; ++u) {
    Rng rng(derive_seed(cfg.seed, "synth-user:" + data.user_ids[u]));
    for (int q = 0; q < m; ++q) question_order[static_cast<std::size_t>(q)] = q;
    rng.shuffle(question_order);

    std::int64_t t = kBaseTimestampMs + static_cast<std::int64_t>(u) * kUserSpacingMs;
    for (int q : question_order) {
      t += 30'000 + static_cast<std::int64_t>(rng.uniform_int(60'001));
      const std::size_t cell = static_cast<std::size_t>(u) * m + q;
      Interaction it;
      it.user_id = data.user_ids[u];
      it.question_id = data.question_ids[static_cast<std::size_t>(q)];
      it.section = data.question_sections[static_cast<std::size_t>(q)];
      it.correct = rng.bernoulli(data.truth.correct_prob[cell]);
      it.time_limit_ms = cfg.time_limit_ms;
      // Timeliness tracks the noise-free skill signal.
      double timely_p = 0.3 + 0.6 * raw_prob[cell];
      if (rng.bernoulli(timely_p)) {
        it.elapsed_ms = static_cast<std::int64_t>(
            static_cast<double>(cfg.time_limit_ms) * (0.3 + 0.7 * rng.uniform()));
      } else {
        it.elapsed_ms =
            cfg.time_limit_ms + 1 +
            static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(cfg.time_limit_ms)));
      }
      it.timestamp = t;
      data.interactions.push_back(std::move(it));
    }

    double lc_sum = 0.0, rc_sum = 0.0;
    int lc_count = 0, rc_count = 0;
    for (int q = 0; q < m; ++q) {
      double p = raw_prob[static_cast<std::size_t>(u) * m + q];
      if (data.question_sections[static_cast<std::size_t>(q)] == Section::LC) {
        lc_sum += p;
        ++lc_count;
      } else {
        rc_sum += p;
        ++rc_count;
      }
    }
    int lc = lc_count > 0 ? affine_section_score(lc_sum / lc_count, cfg.phi_a) : 0;
    int rc = rc_count > 0 ? affine_section_score(rc_sum / rc_count, cfg.phi_a) : 0;
    data.truth.true_score_lc[static_cast<std::size_t>(u)] = lc;
    data.truth.true_score_rc[static_cast<std::size_t>(u)] = rc;
    data.truth.true_score_total[static_cast<std::size_t>(u)] = lc + rc;

    ScoreLabel label;
    label.user_id = data.user_ids[u];
    label.score_total = lc + rc;
    label.score_lc = lc;
    label.score_rc = rc;
    label.report_time = t + 3'600'000;
    data.labels.push_back(label);
    if (rng.bernoulli(0.25)) {
      ScoreLabel second = label;
      second.report_time += 86'400'000;
      data.labels.push_back(std::move(second));
    }
  }

  return data;
}

DatasetSplit split_dataset(const std::vector<ScoreLabel>& labels, double r_train,
                           double r_val, double r_test, std::uint64_t seed) {
  if (labels.empty()) fail(ErrorKind::EmptyInput, "no labels to split");
  if (r_train < 0 || r_val < 0 || r_test < 0)
    fail(ErrorKind::InvalidConfig, "split ratios must be non-negative");
  if (std::abs(r_train + r_val + r_test - 1.0) > 1e-9)
    fail(ErrorKind::InvalidConfig, "split ratios must sum to 1");

  std::vector<std::string> users;
  users.reserve(labels.size());
  for (const auto& label : labels) users.push_back(label.user_id);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());

  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(users);

  const auto n = static_cast<double>(users.size());
  const std::size_t cut1 = static_cast<std::size_t>(std::floor(r_train * n + 0.5));
  const std::size_t cut2 =
      std::min(users.size(), static_cast<std::size_t>(std::floor((r_train + r_val) * n + 0.5)));

  DatasetSplit split;
  std::unordered_map<std::string, int> part_of;
  part_of.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    int part = i < cut1 ? 0 : (i < cut2 ? 1 : 2);
    part_of.emplace(users[i], part);
    auto& dest = part == 0 ? split.train : (part == 1 ? split.validation : split.test);
    dest.users.push_back(users[i]);
  }
  for (auto* part : {&split.train, &split.validation, &split.test})
    std::sort(part->users.begin(), part->users.end());

  for (const auto& label : labels) {
    switch (part_of.at(label.user_id)) {
      case 0: split.train.labels.push_back(label); break;
      case 1: split.validation.labels.push_back(label); break;
      default: split.test.labels.push_back(label); break;
    }
  }
  return split;
}

std::vector<StudentSequence> build_sequences(
    const std::vector<Interaction>& interactions, std::size_t max_len) {
  if (max_len == 0) fail(ErrorKind::InvalidArgument, "max_len must be positive");

  std::unordered_map<std::string, std::vector<Interaction>> by_user;
  for (const auto& it : interactions) by_user[it.user_id].push_back(it);

  std::vector<std::string> users;
  users.reserve(by_user.size());
  for (const auto& [user, events] : by_user) users.push_back(user);
  std::sort(users.begin(), users.end());

  std::vector<StudentSequence> sequences;
  sequences.reserve(users.size());
  for (auto& user : users) {
    StudentSequence seq;
    seq.user_id = user;
    seq.events = std::move(by_user[user]);
    // Full-field tiebreak gives a total order, so any input permutation of the
    // same multiset of events produces identical output.
    std::sort(seq.events.begin(), seq.events.end(),
              [](const Interaction& a, const Interaction& b) {
                return std::tie(a.timestamp, a.question_id, a.correct, a.elapsed_ms,
                                a.time_limit_ms) <
                       std::tie(b.timestamp, b.question_id, b.correct, b.elapsed_ms,
                                b.time_limit_ms);
              });
    if (seq.events.size() > max_len)
      seq.events.erase(seq.events.begin(),
                       seq.events.end() - static_cast<std::ptrdiff_t>(max_len));
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

}  // namespace scorepred
