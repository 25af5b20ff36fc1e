// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace teamlab
{

/// Reads a finished run directory and writes CSV tables to <run_dir>/report:
///
///   accuracy.csv          flat vs hierarchical accuracy per model x dataset,
///                         baseline cells, with bootstrap 95% intervals
///   structure_ttest.csv   paired t per dataset and pooled; pairs are
///                         questions, difference is flat minus hierarchical
///   diversity_ttest.csv   persona cell vs matched baseline accuracy, per
///                         structure x dataset and pooled per structure
///   gini_accuracy.csv     one row per persona cell: gini, stratum, accuracy
///   probe_deltas.csv      mapped pre/post Likert pairs per structure x
///                         diversity, paired t of post minus pre
///   pre_kruskal.csv       pre Likert items across low/medium/high strata
///   judge_means.csv       five-dimension judge means per structure x diversity
///   log_odds_pre_q1.csv, log_odds_pre_q2.csv
///                         open pre-probe answers, flat against hierarchical
///
/// p-values are two-sided. Throws NoRecords when the run holds no records.
std::vector<std::filesystem::path> report(const std::filesystem::path& run_dir);

} // namespace teamlab
