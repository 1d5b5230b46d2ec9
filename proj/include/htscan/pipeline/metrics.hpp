// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/gnn/train.hpp"

namespace htscan::pipeline {

struct FoldCounts {
  int tp = 0;  // infected classified infected
  int fn = 0;  // infected classified free
  int fp = 0;  // free classified infected
  int tn = 0;  // free classified free
};

struct EvalReport {
  FoldCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  bool precision_undefined = false;  // division by zero collapsed to 0
  bool recall_undefined = false;
  bool f_undefined = false;
  double detect_ms_per_sample = 0.0;
};

inline double f_beta_score(double p, double r, double beta, bool* undefined = nullptr) {
  double denom = beta * beta * p + r;
  if (denom == 0.0) {
    if (undefined) *undefined = true;
    return 0.0;
  }
  return (1.0 + beta * beta) * p * r / denom;
}

/// Counts TP/FN/FP/TN of argmax predictions over the test set and derives
/// precision, recall and F_beta; zero denominators yield 0 with a flag.
inline EvalReport evaluate(const gnn::ModelParams& model,
                           const std::vector<gnn::GraphSample>& test_set, double beta) {
  if (test_set.empty()) raise(errc::empty_dataset, "evaluate on empty test set");
  EvalReport rep;
  auto start = std::chrono::steady_clock::now();
  for (const gnn::GraphSample& s : test_set) {
    gnn::Prediction p = gnn::predict(model, s);
    if (s.infected)
      ++(p.infected ? rep.counts.tp : rep.counts.fn);
    else
      ++(p.infected ? rep.counts.fp : rep.counts.tn);
  }
  auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  rep.detect_ms_per_sample = elapsed.count() / static_cast<double>(test_set.size());

  const double tp = rep.counts.tp;
  if (rep.counts.tp + rep.counts.fp == 0) {
    rep.precision_undefined = true;
  } else {
    rep.precision = tp / static_cast<double>(rep.counts.tp + rep.counts.fp);
  }
  if (rep.counts.tp + rep.counts.fn == 0) {
    rep.recall_undefined = true;
  } else {
    rep.recall = tp / static_cast<double>(rep.counts.tp + rep.counts.fn);
  }
  rep.f_beta = f_beta_score(rep.precision, rep.recall, beta, &rep.f_undefined);
  return rep;
}

}  // namespace htscan::pipeline
