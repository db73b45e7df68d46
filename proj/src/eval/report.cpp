// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vampdiff/error.hpp"

namespace vampdiff::eval {

namespace {

void summary_row(std::ostringstream& os, const char* name, const Summary& s) {
  os << name << ',' << format_number(s.mean) << ',' << format_number(s.std) << ',' << s.count << '\n';
}

void detection_rows(std::ostringstream& os, const char* score, const std::vector<DetectionMetrics>& ms) {
  for (const auto& m : ms) {
    os << score << ',' << m.group << ',' << m.positives << ',' << m.negatives << ',' << format_number(m.auroc) << ','
       << format_number(m.auprc) << ',' << format_number(m.tpr_at_5fpr) << '\n';
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string recon_csv(const ReconReport& report) {
  std::ostringstream os;
  os << "source_id,start_index,mae,rmse,pearson,hr_valid,hr_true,hr_recon,hr_abs_err,ibi_abs_err\n";
  for (const auto& r : report.records) {
    os << r.source_id << ',' << r.start_index << ',' << format_number(r.mae) << ',' << format_number(r.rmse) << ','
       << format_number(r.pearson) << ',' << (r.hr_valid ? 1 : 0);
    if (r.hr_valid) {
      os << ',' << format_number(r.hr_true) << ',' << format_number(r.hr_recon) << ',' << format_number(r.hr_abs_err)
         << ',' << format_number(r.ibi_abs_err);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string recon_summary_csv(const ReconReport& report) {
  std::ostringstream os;
  os << "metric,mean,std,count\n";
  summary_row(os, "mae", report.mae);
  summary_row(os, "rmse", report.rmse);
  summary_row(os, "pearson", report.pearson);
  summary_row(os, "hr_abs_err", report.hr_abs_err);
  summary_row(os, "ibi_abs_err", report.ibi_abs_err);
  os << "hr_excluded,,," << report.hr_excluded << '\n';
  return os.str();
}

std::string gen_signals_csv(const GenReport& report) {
  std::ostringstream os;
  os << "index,hr_bpm,ibi_s,peak_count,ptp,std\n";
  for (std::size_t i = 0; i < report.generated.size(); ++i) {
    const auto& s = report.generated[i];
    os << i << ',' << format_number(s.hr_bpm) << ',' << format_number(s.ibi_s) << ',' << s.peak_count << ','
       << format_number(s.ptp) << ',' << format_number(s.std) << '\n';
  }
  return os.str();
}

std::string gen_summary_csv(const GenReport& report) {
  std::ostringstream os;
  os << "key,value\n";
  os << "n," << report.generated.size() << '\n';
  os << "peak_fraction," << format_number(report.peak_fraction) << '\n';
  os << "hr_mean," << format_number(report.hr.mean) << '\n';
  os << "hr_std," << format_number(report.hr.std) << '\n';
  os << "ibi_mean," << format_number(report.ibi.mean) << '\n';
  os << "ptp_mean," << format_number(report.ptp.mean) << '\n';
  os << "std_mean," << format_number(report.std.mean) << '\n';
  os << "reference_hr_mean," << format_number(report.reference_hr_mean) << '\n';
  os << "hr_gap," << format_number(report.hr_gap) << '\n';
  os << "pairs," << report.pairs << '\n';
  os << "mean_pairwise_l2," << format_number(report.mean_pairwise_l2) << '\n';
  os << "ks_hr," << format_number(report.ks_hr) << '\n';
  os << "ks_ptp," << format_number(report.ks_ptp) << '\n';
  os << "ks_std," << format_number(report.ks_std) << '\n';
  return os.str();
}

std::string anomaly_csv(const AnomalyReport& report) {
  std::ostringstream os;
  os << "score,group,positives,negatives,auroc,auprc,tpr_at_5fpr\n";
  detection_rows(os, "mae", report.by_mae);
  detection_rows(os, "corr", report.by_corr);
  os << "spearman_input_vs_recon,overall,,," << format_number(report.spearman_input_vs_recon) << ",,\n";
  return os.str();
}

std::string anomaly_scores_csv(const AnomalyReport& report) {
  std::ostringstream os;
  os << "index,kind,label,input_score,mae_score,corr_score\n";
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    os << i << ',' << report.kinds[i] << ',' << report.labels[i] << ',' << format_number(report.input_scores[i]) << ','
       << format_number(report.scores[i].mae_score) << ',' << format_number(report.scores[i].corr_score) << '\n';
  }
  return os.str();
}

std::string rr_csv(const RrReport& report) {
  std::ostringstream os;
  os << "recording,windows,rr_etco2,pred_real,pred_recon,abs_delta\n";
  for (const auto& r : report.rows) {
    os << r.id << ',' << r.windows << ',' << format_number(r.rr_etco2) << ',' << format_number(r.pred_real) << ','
       << format_number(r.pred_recon) << ',' << format_number(r.abs_delta) << '\n';
  }
  for (const auto& e : report.excluded) os << "# excluded " << e.id << ": " << e.reason << '\n';
  os << "# mean_abs_delta=" << format_number(report.mean_abs_delta) << " mae_real=" << format_number(report.mae_real)
     << " mae_recon=" << format_number(report.mae_recon) << " mae_delta=" << format_number(report.mae_delta) << '\n';
  return os.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count,density\n";
  const auto d = h.density();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_number(h.lo + static_cast<double>(i) * h.bin_width()) << ','
       << format_number(h.lo + static_cast<double>(i + 1) * h.bin_width()) << ',' << h.counts[i] << ','
       << format_number(d[i]) << '\n';
  }
  return os.str();
}

std::string interpolation_csv(const InterpSweep& sweep) {
  std::ostringstream os;
  os << "# hr_lo=" << format_number(sweep.hr_lo) << " hr_hi=" << format_number(sweep.hr_hi) << '\n';
  os << "alpha,hr_bpm";
  const std::size_t len = sweep.points.empty() ? 0 : sweep.points.front().window.length();
  for (std::size_t i = 0; i < len; ++i) os << ",s" << i;
  os << '\n';
  for (const auto& p : sweep.points) {
    os << format_number(p.alpha) << ',' << format_number(p.hr_bpm);
    for (double v : p.window.samples) os << ',' << format_number(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace vampdiff::eval
