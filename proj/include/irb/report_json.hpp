// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_REPORT_JSON_HPP
#define IRB_REPORT_JSON_HPP

#include "irb/analysis.hpp"
#include "irb/bias.hpp"
#include "irb/storage.hpp"
#include "irb/train.hpp"

namespace irb::report {

using storage::ordered_json;

ordered_json bias_report_json(const bias::BiasReport& report);
ordered_json validation_report_json(const ValidationReport& report);

// CSV rows (bin_center, count_real, count_generated).
std::vector<std::vector<std::string>> distribution_csv_rows(
    const bias::ScoreDistribution& dist);
ordered_json distribution_json(const bias::ScoreDistribution& dist);

std::vector<std::string> sweep_alpha_columns();
std::vector<std::vector<std::string>> sweep_alpha_csv_rows(
    const std::vector<train::SweepAlphaRow>& rows);

std::vector<std::string> sweep_beta_columns();
std::vector<std::vector<std::string>> sweep_beta_csv_rows(
    const std::vector<train::SweepBetaRow>& rows);

std::vector<std::vector<std::string>> trace_csv_rows(
    const train::TrainTrace& trace);
std::vector<std::string> trace_columns();

ordered_json transform_set_json(const analysis::TransformSet& tset);

// Rows (family, item, x, y) for the r / r^d / p families.
std::vector<std::vector<std::string>> projection_csv_rows(
    const analysis::TransformSet& tset);

}  // namespace irb::report

#endif  // IRB_REPORT_JSON_HPP
