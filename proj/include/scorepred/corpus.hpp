#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scorepred/error.hpp"

namespace scorepred {

enum class Section : std::uint8_t { LC = 0, RC = 1 };

const char* section_name(Section s);
Section section_from_name(std::string_view name);

// One student-question event.
struct Interaction {
  std::string user_id;
  std::string question_id;
  Section section = Section::LC;
  bool correct = false;
  std::int64_t elapsed_ms = 0;       // >= 0
  std::int64_t time_limit_ms = 1;    // > 0
  std::int64_t timestamp = 0;        // ms since epoch

  bool timely() const { return elapsed_ms <= time_limit_ms; }
  bool operator==(const Interaction&) const = default;
};

// Time-ordered per-user event list; ties broken by question_id.
struct StudentSequence {
  std::string user_id;
  std::vector<Interaction> events;
};

struct ScoreLabel {
  std::string user_id;
  int score_total = 0;               // [0, 990]
  std::optional<int> score_lc;       // [0, 495]
  std::optional<int> score_rc;       // [0, 495]
  std::int64_t report_time = 0;

  bool operator==(const ScoreLabel&) const = default;
};

struct SplitPart {
  std::vector<std::string> users;
  std::vector<ScoreLabel> labels;
};

// User-disjoint partitions; every label lands in exactly one part.
struct DatasetSplit {
  SplitPart train;
  SplitPart validation;
  SplitPart test;
};

enum class FileFormat { Csv, Jsonl };

// Interaction files use the fixed column set
//   user_id,question_id,section,correct,elapsed_ms,time_limit_ms,timestamp
// with section in {LC,RC} and correct in {0,1}. JSONL uses the same field
// names, one object per line. Reported line numbers are physical file lines
// (the CSV header is line 1).
std::vector<Interaction> parse_interactions(const std::filesystem::path& path,
                                            FileFormat format);
void write_interactions(const std::vector<Interaction>& rows,
                        const std::filesystem::path& path, FileFormat format);

// Score label CSV: user_id,score_total,score_lc,score_rc,report_time.
// Optional section scores serialize as empty fields.
std::vector<ScoreLabel> parse_score_labels(const std::filesystem::path& path);
void write_score_labels(const std::vector<ScoreLabel>& labels,
                        const std::filesystem::path& path);

struct SynthConfig {
  int n_users = 200;
  int n_questions = 60;
  int latent_dim = 3;
  double noise = 0.05;               // label-independent correctness flip rate, [0, 0.5)
  std::uint64_t seed = 1;
  std::int64_t time_limit_ms = 45000;
  double phi_a = 0.25;
  double phi_b = 0.0;
  double phi_c = 1.0;
};

// Planted generating model, exposed so tests and the simulation harness can
// compare against ground truth.
struct SynthTruth {
  int latent_dim = 0;
  std::vector<double> user_vecs;       // n x k row-major
  std::vector<double> question_vecs;   // m x k row-major
  double phi_a = 0, phi_b = 0, phi_c = 1;
  std::vector<double> correct_prob;    // n x m row-major, includes noise flip
  std::vector<int> true_score_total;   // per user
  std::vector<int> true_score_lc;
  std::vector<int> true_score_rc;
};

struct SynthData {
  std::vector<Interaction> interactions;
  std::vector<ScoreLabel> labels;
  std::vector<std::string> user_ids;       // canonical generation order
  std::vector<std::string> question_ids;
  std::vector<Section> question_sections;
  SynthTruth truth;
};

// Fully determined by cfg.seed. Every user answers every question once, in a
// per-user shuffled order; correctness is Bernoulli from the planted logistic
// latent-factor model with flip noise; the true score is an affine map of the
// user's noise-free mean correctness probability per section, rounded to a
// multiple of 5 and clamped into range.
SynthData generate_synthetic(const SynthConfig& cfg);

// Splits by user: distinct users are shuffled under `seed` and cut at
// round(ratio * n) boundaries, so user-count proportions land within one user
// of the requested ratios. Ratios must be non-negative and sum to 1 (1e-9).
DatasetSplit split_dataset(const std::vector<ScoreLabel>& labels, double r_train,
                           double r_val, double r_test, std::uint64_t seed);

// One sequence per user, events sorted by (timestamp, question_id); sequences
// longer than max_len keep the most recent max_len events. Output is ordered
// by user_id.
std::vector<StudentSequence> build_sequences(
    const std::vector<Interaction>& interactions, std::size_t max_len = 512);

}  // namespace scorepred
