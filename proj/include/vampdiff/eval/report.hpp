// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vampdiff/eval/evaluate.hpp"

namespace vampdiff::eval {

// %.17g; NaN and empty optionals format as an empty cell.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

// Writes text to path, creating parent directories. IoError naming the path
// on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

// source_id,start_index,mae,rmse,pearson,hr_valid,hr_true,hr_recon,hr_abs_err,ibi_abs_err
std::string recon_csv(const ReconReport& report);
// metric,mean,std,count then hr_excluded
std::string recon_summary_csv(const ReconReport& report);
// index,hr_bpm,ibi_s,peak_count,ptp,std
std::string gen_signals_csv(const GenReport& report);
// key,value
std::string gen_summary_csv(const GenReport& report);
// score,group,positives,negatives,auroc,auprc,tpr_at_5fpr then a spearman row
std::string anomaly_csv(const AnomalyReport& report);
// index,kind,label,input_score,mae_score,corr_score
std::string anomaly_scores_csv(const AnomalyReport& report);
// recording,windows,rr_etco2,pred_real,pred_recon,abs_delta; exclusions and
// aggregates follow as comment lines
std::string rr_csv(const RrReport& report);
// bin_lo,bin_hi,count,density
std::string histogram_csv(const Histogram& h);
// alpha,hr_bpm,s0,s1,...
std::string interpolation_csv(const InterpSweep& sweep);

}  // namespace vampdiff::eval
