// data.hpp - samples, labels, datasets and the train/pool/test split.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocal/rng.hpp"

namespace ocal {

enum class Label { Positive, Negative, Unlabeled };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Positive: return "positive";
    case Label::Negative: return "negative";
    default: return "unlabeled";
  }
}

struct Sample {
  int id = 0;
  std::vector<double> x;
};

// A dataset holds the feature vectors plus (optionally) ground-truth
// positive/negative labels aligned with the samples. Truth is consulted only
// by the ground-truth oracle and the evaluator, never by query strategies.
struct Dataset {
  std::vector<Sample> samples;
  std::optional<std::vector<Label>> truth;

  std::size_t size() const { return samples.size(); }
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }
};

struct ValidationReport {
  bool ok = true;
  int dim = 0;
  std::size_t n_samples = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::vector<std::string> problems;

  std::string to_string() const {
    std::ostringstream os;
    os << "samples: " << n_samples << "\n"
       << "dimension: " << dim << "\n";
    if (n_positive + n_negative > 0)
      os << "truth: " << n_positive << " positive, " << n_negative << " negative\n";
    else
      os << "truth: absent\n";
    os << "status: " << (ok ? "ok" : "invalid") << "\n";
    for (const auto& p : problems) os << "  problem: " << p << "\n";
    return os.str();
  }
};

// Raised when a dataset or configuration fails validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport rep;
  rep.n_samples = d.samples.size();
  if (d.samples.empty()) {
    rep.ok = false;
    rep.problems.push_back("dataset is empty");
    return rep;
  }
  rep.dim = static_cast<int>(d.samples.front().x.size());
  if (rep.dim < 1) {
    rep.ok = false;
    rep.problems.push_back("feature dimension is zero");
  }
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const Sample& s = d.samples[i];
    if (s.id != static_cast<int>(i)) {
      rep.ok = false;
      rep.problems.push_back("sample at position " + std::to_string(i) + " has id " +
                             std::to_string(s.id) + " (ids must be 0..n-1 in order)");
      break;
    }
  }
  for (const Sample& s : d.samples) {
    if (static_cast<int>(s.x.size()) != rep.dim) {
      rep.ok = false;
      rep.problems.push_back("sample " + std::to_string(s.id) + " has dimension " +
                             std::to_string(s.x.size()) + ", expected " + std::to_string(rep.dim));
      break;
    }
  }
  for (const Sample& s : d.samples) {
    bool bad = false;
    for (double v : s.x)
      if (!std::isfinite(v)) bad = true;
    if (bad) {
      rep.ok = false;
      rep.problems.push_back("sample " + std::to_string(s.id) + " has a non-finite feature");
      break;
    }
  }
  if (d.truth) {
    if (d.truth->size() != d.samples.size()) {
      rep.ok = false;
      rep.problems.push_back("truth has " + std::to_string(d.truth->size()) + " entries for " +
                             std::to_string(d.samples.size()) + " samples");
    } else {
      for (std::size_t i = 0; i < d.truth->size(); ++i) {
        if ((*d.truth)[i] == Label::Unlabeled) {
          rep.ok = false;
          rep.problems.push_back("truth entry " + std::to_string(i) + " is unlabeled");
          break;
        }
      }
      for (Label l : *d.truth) {
        if (l == Label::Positive) ++rep.n_positive;
        if (l == Label::Negative) ++rep.n_negative;
      }
    }
  }
  return rep;
}

// Insertion-ordered id sets so that every trace is reproducible.
struct PoolState {
  std::vector<int> positives;  // P
  std::vector<int> negatives;  // N
  std::vector<int> unlabeled;  // U
  std::vector<int> test;       // T

  std::vector<int> labeled() const {
    std::vector<int> l = positives;
    l.insert(l.end(), negatives.begin(), negatives.end());
    return l;
  }
};

struct SplitSpec {
  std::size_t pool_size = 200;
  double train_fraction = 0.5;  // fraction of out-of-pool targets used as P
  std::uint64_t seed = 0;
};

// Splits a labeled dataset into the experiment protocol's four id sets:
// U gets pool_size ids drawn uniformly; of the remaining targets a fraction
// becomes P; everything else (remaining targets' complement plus all
// non-targets) is the test set T. N starts empty.
inline PoolState protocol_split(const Dataset& d, const SplitSpec& spec) {
  const ValidationReport rep = validate_dataset(d);
  if (!rep.ok) throw ValidationError("protocol_split: invalid dataset: " + rep.problems.front());
  if (!d.truth) throw ValidationError("protocol_split: dataset has no truth labels");
  if (spec.pool_size >= d.size())
    throw ValidationError("protocol_split: pool_size " + std::to_string(spec.pool_size) +
                          " must be smaller than the dataset (" + std::to_string(d.size()) + ")");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ValidationError("protocol_split: train_fraction must be in (0,1)");

  const int n = static_cast<int>(d.size());
  SplitMix64 rng(spec.seed);

  PoolState pool;
  pool.unlabeled = sample_without_replacement(n, static_cast<int>(spec.pool_size), rng);

  std::vector<char> in_pool(static_cast<std::size_t>(n), 0);
  for (int id : pool.unlabeled) in_pool[static_cast<std::size_t>(id)] = 1;

  std::vector<int> outside_targets;
  for (int id = 0; id < n; ++id)
    if (!in_pool[static_cast<std::size_t>(id)] && (*d.truth)[static_cast<std::size_t>(id)] == Label::Positive)
      outside_targets.push_back(id);

  if (outside_targets.empty())
    throw ValidationError("protocol_split: no target samples outside the pool");
  const int n_train =
      static_cast<int>(std::floor(spec.train_fraction * static_cast<double>(outside_targets.size())));
  if (n_train < 1)
    throw ValidationError("protocol_split: train_fraction leaves no target samples for training");

  const std::vector<int> picks =
      sample_without_replacement(static_cast<int>(outside_targets.size()), n_train, rng);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (int k : picks) {
    const int id = outside_targets[static_cast<std::size_t>(k)];
    pool.positives.push_back(id);
    taken[static_cast<std::size_t>(id)] = 1;
  }
  for (int id = 0; id < n; ++id)
    if (!in_pool[static_cast<std::size_t>(id)] && !taken[static_cast<std::size_t>(id)])
      pool.test.push_back(id);
  return pool;
}

// Moves an answered pool sample into P or N. Returns a new state; the
// argument is untouched.
inline PoolState apply_oracle_answer(const PoolState& p, int id, Label answer) {
  if (answer != Label::Positive && answer != Label::Negative)
    throw std::invalid_argument("apply_oracle_answer: answer must be positive or negative");
  const auto it = std::find(p.unlabeled.begin(), p.unlabeled.end(), id);
  if (it == p.unlabeled.end())
    throw std::invalid_argument("apply_oracle_answer: sample " + std::to_string(id) +
                                " is not in the unlabeled pool");
  PoolState next = p;
  next.unlabeled.erase(next.unlabeled.begin() + (it - p.unlabeled.begin()));
  if (answer == Label::Positive)
    next.positives.push_back(id);
  else
    next.negatives.push_back(id);
  return next;
}

}  // namespace ocal
