#include "hetcoef/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hetcoef/errors.hpp"
#include "hetcoef/quantile.hpp"

namespace hetcoef {

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::kPass:
      return "pass";
    case VerdictStatus::kFail:
      return "fail";
    case VerdictStatus::kNotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

namespace {

struct Binning {
  std::vector<double> edges;  // interior cut points, size n_bins - 1
  std::vector<std::vector<Eigen::Index>> members;

  double lo(int b) const { return b == 0 ? 0.0 : edges[b - 1]; }
  double hi(int b) const {
    return b + 1 == static_cast<int>(members.size()) ? 1.0 : edges[b];
  }
};

Binning make_binning(const ControlEstimate& control, int n_bins) {
  const Eigen::Index n = control.v_hat.size();
  if (n == 0) throw DataError("empty dataset");
  if (n_bins < 1) throw DataError("n_bins must be >= 1");
  if (n_bins > n) throw DataError("n_bins exceeds the sample size");

  std::vector<double> sorted(control.v_hat.data(),
                             control.v_hat.data() + n);
  std::sort(sorted.begin(), sorted.end());
  Binning bins;
  bins.edges.resize(n_bins - 1);
  for (int b = 1; b < n_bins; ++b)
    bins.edges[b - 1] =
        sorted_quantile(sorted, static_cast<double>(b) / n_bins);
  bins.members.resize(n_bins);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int b = static_cast<int>(
        std::upper_bound(bins.edges.begin(), bins.edges.end(),
                         control.v_hat[i]) -
        bins.edges.begin());
    bins.members[b].push_back(i);
  }
  return bins;
}

Eigen::Index adequate_count(const BasisSpec& p_spec) {
  return std::max<Eigen::Index>(p_spec.dimension, 30);
}

void fill_second_moments(const Dataset& data, const Binning& bins,
                         const BasisSpec& p_spec,
                         std::vector<BinRecord>& records) {
  const int j = p_spec.dimension;
  records.resize(bins.members.size());
  for (std::size_t b = 0; b < bins.members.size(); ++b) {
    BinRecord& rec = records[b];
    rec.v_lo = bins.lo(static_cast<int>(b));
    rec.v_hi = bins.hi(static_cast<int>(b));
    rec.count = static_cast<Eigen::Index>(bins.members[b].size());
    rec.adequate = rec.count >= adequate_count(p_spec);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(j, j);
    for (Eigen::Index i : bins.members[b]) {
      const Eigen::VectorXd p = eval_p(p_spec, data.x.row(i).transpose());
      m.selfadjointView<Eigen::Lower>().rankUpdate(p, 1.0);
    }
    m = m.selfadjointView<Eigen::Lower>();
    if (rec.count > 0) m /= static_cast<double>(rec.count);
    rec.second_moment = m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    rec.min_eigenvalue = eig.eigenvalues()[0];
    rec.max_eigenvalue = eig.eigenvalues()[j - 1];
  }
}

bool bin_nonsingular(const BinRecord& rec, double eps_rel) {
  return rec.min_eigenvalue >= eps_rel * std::max(rec.max_eigenvalue, 0.0);
}

std::string bin_label(const BinRecord& rec) {
  std::ostringstream out;
  out << "[" << rec.v_lo << "," << rec.v_hi << "]";
  return out.str();
}

bool is_binary_column(const Dataset& data) {
  if (data.x.cols() != 1) return false;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.x(i, 0) != 0.0 && data.x(i, 0) != 1.0) return false;
  return true;
}

double sample_sd(const Eigen::MatrixXd& x) {
  const double mean = x.col(0).mean();
  const double var =
      (x.col(0).array() - mean).square().sum() /
      std::max<Eigen::Index>(1, x.rows() - 1);
  return std::sqrt(var);
}

// Sorted x values per instrument cell, keyed by code.
std::map<int, std::vector<double>> sorted_cells(const Dataset& data) {
  if (!data.z) throw DataError("missing z column");
  if (data.x.cols() != 1)
    throw DataError("instrument checks require scalar x");
  std::map<int, std::vector<double>> cells;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    cells[(*data.z)[i]].push_back(data.x(i, 0));
  for (auto& [code, values] : cells) std::sort(values.begin(), values.end());
  return cells;
}

}  // namespace

DiagnosticsReport conditional_second_moment(
    const Dataset& data, const ControlEstimate& control,
    const BasisSpec& p_spec, const DiagnosticsOptions& options) {
  p_spec.validate();
  if (data.n() != control.v_hat.size())
    throw DataError("control estimate does not match the dataset rows");
  const Binning bins = make_binning(control, options.n_bins);

  DiagnosticsReport report;
  report.p_spec = p_spec;
  report.n = data.n();
  report.n_bins = options.n_bins;
  fill_second_moments(data, bins, p_spec, report.per_bin);

  int adequate = 0, singular = 0;
  std::string first_bad;
  for (const BinRecord& rec : report.per_bin) {
    if (!rec.adequate) continue;
    ++adequate;
    if (!bin_nonsingular(rec, options.eps_id_rel)) {
      ++singular;
      if (first_bad.empty()) {
        std::ostringstream out;
        out << "bin " << bin_label(rec) << " min eigenvalue "
            << rec.min_eigenvalue << " below " << options.eps_id_rel
            << " * max eigenvalue " << rec.max_eigenvalue;
        first_bad = out.str();
      }
    }
  }
  Verdict verdict;
  if (adequate == 0) {
    verdict.status = VerdictStatus::kNotApplicable;
    verdict.detail = "no adequately populated bins";
  } else if (singular == 0) {
    verdict.status = VerdictStatus::kPass;
    std::ostringstream out;
    out << adequate << "/" << adequate
        << " adequately populated bins have a nonsingular conditional "
           "second moment";
    verdict.detail = out.str();
  } else {
    verdict.status = VerdictStatus::kFail;
    std::ostringstream out;
    out << singular << "/" << adequate
        << " adequately populated bins singular; first: " << first_bad;
    verdict.detail = out.str();
  }
  report.overall_verdicts["assumption2"] = verdict;
  return report;
}

Verdict check_binary_overlap(const Dataset& data,
                             const ControlEstimate& control,
                             const DiagnosticsOptions& options,
                             DiagnosticsReport* report) {
  if (!is_binary_column(data))
    throw DataError("binary overlap check requires scalar x in {0,1}");
  const BasisSpec p_spec = BasisSpec::Power(2);
  const Binning bins = make_binning(control, options.n_bins);
  std::vector<BinRecord> records;
  fill_second_moments(data, bins, p_spec, records);

  int adequate = 0, bad = 0;
  std::string first_bad;
  for (std::size_t b = 0; b < records.size(); ++b) {
    BinRecord& rec = records[b];
    double p_hat = std::numeric_limits<double>::quiet_NaN();
    if (rec.count > 0) {
      double total = 0.0;
      for (Eigen::Index i : bins.members[b]) total += data.x(i, 0);
      p_hat = total / static_cast<double>(rec.count);
    }
    rec.propensity = p_hat;
    // With p(x) = (1, x) and x binary the sample second moment is
    // [[1, P], [P, P]], so det = P(1-P) = Var(X | bin) exactly.
    rec.determinant = rec.second_moment(0, 0) * rec.second_moment(1, 1) -
                      rec.second_moment(0, 1) * rec.second_moment(1, 0);
    rec.propensity_variance = p_hat * (1.0 - p_hat);
    if (!rec.adequate) continue;
    ++adequate;
    if (!(p_hat >= options.eps_propensity &&
          p_hat <= 1.0 - options.eps_propensity)) {
      ++bad;
      if (first_bad.empty()) {
        std::ostringstream out;
        out << "bin " << bin_label(rec) << " propensity " << p_hat
            << " outside [" << options.eps_propensity << ", "
            << 1.0 - options.eps_propensity << "]";
        first_bad = out.str();
      }
    }
  }

  Verdict verdict;
  if (adequate == 0) {
    verdict.status = VerdictStatus::kNotApplicable;
    verdict.detail = "no adequately populated bins";
  } else if (bad == 0) {
    verdict.status = VerdictStatus::kPass;
    verdict.detail = "propensity bounded away from 0 and 1 in all " +
                     std::to_string(adequate) + " adequate bins";
  } else {
    verdict.status = VerdictStatus::kFail;
    verdict.detail = first_bad;
  }

  if (report) {
    if (report->per_bin.size() == records.size()) {
      for (std::size_t b = 0; b < records.size(); ++b) {
        report->per_bin[b].propensity = records[b].propensity;
        report->per_bin[b].determinant = records[b].determinant;
        report->per_bin[b].propensity_variance =
            records[b].propensity_variance;
      }
    } else {
      report->per_bin = std::move(records);
    }
    report->overall_verdicts["binary_overlap"] = verdict;
  }
  return verdict;
}

Verdict check_mutually_exclusive(const Dataset& data,
                                 const ControlEstimate& control,
                                 const DiagnosticsOptions& options,
                                 DiagnosticsReport* report) {
  data.validate_mutually_exclusive();
  const int t_count = static_cast<int>(data.x.cols());
  const BasisSpec p_spec = BasisSpec::TreatmentDummies(t_count);
  const Binning bins = make_binning(control, options.n_bins);
  std::vector<BinRecord> records;
  fill_second_moments(data, bins, p_spec, records);

  int applicable = 0, bad = 0, eigen_disagreements = 0;
  std::string first_bad;
  for (std::size_t b = 0; b < records.size(); ++b) {
    BinRecord& rec = records[b];
    rec.treatment_freqs.assign(t_count, 0.0);
    for (Eigen::Index i : bins.members[b])
      for (int s = 0; s < t_count; ++s)
        rec.treatment_freqs[s] += data.x(i, s);
    double freq_sum = 0.0;
    double min_freq = 1.0;
    for (int s = 0; s < t_count; ++s) {
      if (rec.count > 0)
        rec.treatment_freqs[s] /= static_cast<double>(rec.count);
      freq_sum += rec.treatment_freqs[s];
      min_freq = std::min(min_freq, rec.treatment_freqs[s]);
    }
    rec.exclusive_gap = 1.0 - freq_sum;
    // The criterion is an if-and-only-if for the same bin, so both tests
    // must return the same answer wherever every arm is populated.
    if (!rec.adequate || min_freq <= 0.0) continue;
    ++applicable;
    const bool freq_ok = rec.exclusive_gap >= options.eps_id_rel;
    const bool eigen_ok = bin_nonsingular(rec, options.eps_id_rel);
    if (freq_ok != eigen_ok) ++eigen_disagreements;
    if (!freq_ok) {
      ++bad;
      if (first_bad.empty()) {
        std::ostringstream out;
        out << "bin " << bin_label(rec) << " has 1 - sum(freq) = "
            << rec.exclusive_gap << " below " << options.eps_id_rel;
        first_bad = out.str();
      }
    }
  }

  Verdict verdict;
  std::ostringstream tail;
  tail << "; eigenvalue cross-check disagreements: " << eigen_disagreements
       << "/" << applicable;
  if (applicable == 0) {
    verdict.status = VerdictStatus::kNotApplicable;
    verdict.detail =
        "no adequately populated bin has every treatment arm present";
  } else if (bad == 0) {
    verdict.status = VerdictStatus::kPass;
    verdict.detail = "all " + std::to_string(applicable) +
                     " applicable bins keep the no-treatment cell "
                     "populated" +
                     tail.str();
  } else {
    verdict.status = VerdictStatus::kFail;
    verdict.detail = first_bad + tail.str();
  }

  if (report) {
    if (report->per_bin.size() == records.size()) {
      for (std::size_t b = 0; b < records.size(); ++b) {
        report->per_bin[b].treatment_freqs = records[b].treatment_freqs;
        report->per_bin[b].exclusive_gap = records[b].exclusive_gap;
      }
    } else {
      report->per_bin = std::move(records);
    }
    report->overall_verdicts["mutually_exclusive"] = verdict;
  }
  return verdict;
}

Verdict count_instrument_support(const Dataset& data,
                                 const ControlEstimate& control,
                                 const BasisSpec& p_spec,
                                 const DiagnosticsOptions& options,
                                 DiagnosticsReport* report) {
  p_spec.validate();
  const std::map<int, std::vector<double>> cells = sorted_cells(data);
  const Binning bins = make_binning(control, options.n_bins);
  const double delta_q = options.delta_q_rel * sample_sd(data.x);
  const int j = p_spec.dimension;

  std::vector<BinRecord> records(bins.members.size());
  int adequate = 0, deficient = 0, min_card = -1;
  for (std::size_t b = 0; b < records.size(); ++b) {
    BinRecord& rec = records[b];
    rec.v_lo = bins.lo(static_cast<int>(b));
    rec.v_hi = bins.hi(static_cast<int>(b));
    rec.count = static_cast<Eigen::Index>(bins.members[b].size());
    rec.adequate = rec.count >= adequate_count(p_spec);
    const double v_mid = 0.5 * (rec.v_lo + rec.v_hi);
    for (const auto& [code, values] : cells)
      rec.cell_quantiles.push_back(sorted_quantile(values, v_mid));
    std::vector<double> q = rec.cell_quantiles;
    std::sort(q.begin(), q.end());
    int card = 1;
    for (std::size_t m = 1; m < q.size(); ++m)
      if (q[m] - q[m - 1] > delta_q) ++card;
    rec.support_cardinality = card;
    if (!rec.adequate) continue;
    ++adequate;
    min_card = min_card < 0 ? card : std::min(min_card, card);
    if (card < j) ++deficient;
  }

  Verdict verdict;
  if (adequate == 0) {
    verdict.status = VerdictStatus::kNotApplicable;
    verdict.detail = "no adequately populated bins";
  } else if (deficient == 0) {
    verdict.status = VerdictStatus::kPass;
    std::ostringstream out;
    out << "every adequate bin offers at least " << j
        << " distinct conditional quantiles (min observed " << min_card
        << ")";
    verdict.detail = out.str();
  } else {
    verdict.status = VerdictStatus::kFail;
    std::ostringstream out;
    out << deficient << "/" << adequate
        << " adequate bins have fewer than J=" << j
        << " distinct conditional quantiles (min observed " << min_card
        << "); the instrument cannot identify this many treatment "
           "functions";
    verdict.detail = out.str();
  }

  if (report) {
    if (report->per_bin.size() == records.size()) {
      for (std::size_t b = 0; b < records.size(); ++b) {
        report->per_bin[b].cell_quantiles = records[b].cell_quantiles;
        report->per_bin[b].support_cardinality =
            records[b].support_cardinality;
      }
    } else {
      report->per_bin = std::move(records);
    }
    report->overall_verdicts["support_cardinality"] = verdict;
  }
  return verdict;
}

Verdict check_binary_instrument(const Dataset& data,
                                const ControlEstimate& control,
                                const DiagnosticsOptions& options,
                                DiagnosticsReport* report) {
  const std::map<int, std::vector<double>> cells = sorted_cells(data);
  if (cells.size() != 2)
    throw DataError("binary instrument check requires exactly 2 cells, got " +
                    std::to_string(cells.size()));
  const BasisSpec p_spec = BasisSpec::Power(2);
  const Binning bins = make_binning(control, options.n_bins);
  const double delta_q = options.delta_q_rel * sample_sd(data.x);

  std::vector<BinRecord> records;
  fill_second_moments(data, bins, p_spec, records);

  int adequate = 0, bad = 0, eigen_disagreements = 0;
  std::string first_bad;
  for (std::size_t b = 0; b < records.size(); ++b) {
    BinRecord& rec = records[b];
    const double v_mid = 0.5 * (rec.v_lo + rec.v_hi);
    for (const auto& [code, values] : cells)
      rec.cell_quantiles.push_back(sorted_quantile(values, v_mid));
    const double gap =
        std::abs(rec.cell_quantiles[1] - rec.cell_quantiles[0]);
    rec.support_cardinality = gap > delta_q ? 2 : 1;
    if (!rec.adequate) continue;
    ++adequate;
    const bool gap_ok = gap > delta_q;
    const bool eigen_ok = bin_nonsingular(rec, options.eps_id_rel);
    if (gap_ok && !eigen_ok) ++eigen_disagreements;
    if (!gap_ok) {
      ++bad;
      if (first_bad.empty()) {
        std::ostringstream out;
        out << "bin " << bin_label(rec)
            << " conditional quantiles coincide (gap " << gap << " <= "
            << delta_q << ")";
        first_bad = out.str();
      }
    }
  }

  Verdict verdict;
  std::ostringstream tail;
  tail << "; eigenvalue cross-check disagreements: " << eigen_disagreements
       << "/" << adequate;
  if (adequate == 0) {
    verdict.status = VerdictStatus::kNotApplicable;
    verdict.detail = "no adequately populated bins";
  } else if (bad == 0) {
    verdict.status = VerdictStatus::kPass;
    verdict.detail = "instrument shifts the conditional quantile of x in "
                     "all " +
                     std::to_string(adequate) + " adequate bins" +
                     tail.str();
  } else {
    verdict.status = VerdictStatus::kFail;
    verdict.detail = first_bad + tail.str();
  }

  if (report) {
    if (report->per_bin.size() == records.size()) {
      for (std::size_t b = 0; b < records.size(); ++b) {
        if (report->per_bin[b].cell_quantiles.empty())
          report->per_bin[b].cell_quantiles = records[b].cell_quantiles;
        report->per_bin[b].support_cardinality =
            records[b].support_cardinality;
      }
    } else {
      report->per_bin = std::move(records);
    }
    report->overall_verdicts["binary_instrument"] = verdict;
  }
  return verdict;
}

DiagnosticsReport diagnose_all(const Dataset& data,
                               const ControlEstimate& control,
                               const BasisSpec& p_spec,
                               const DiagnosticsOptions& options) {
  DiagnosticsReport report =
      conditional_second_moment(data, control, p_spec, options);

  if (is_binary_column(data)) {
    check_binary_overlap(data, control, options, &report);
  } else {
    report.overall_verdicts["binary_overlap"] = {
        VerdictStatus::kNotApplicable, "x is not a binary scalar"};
  }

  if (data.x.cols() > 1) {
    check_mutually_exclusive(data, control, options, &report);
  } else {
    report.overall_verdicts["mutually_exclusive"] = {
        VerdictStatus::kNotApplicable, "x is not a treatment dummy matrix"};
  }

  if (data.z && data.x.cols() == 1) {
    count_instrument_support(data, control, p_spec, options, &report);
    std::set<int> codes((*data.z).begin(), (*data.z).end());
    if (codes.size() == 2 && p_spec.dimension == 2 &&
        p_spec.kind == BasisKind::kPower) {
      check_binary_instrument(data, control, options, &report);
    } else {
      report.overall_verdicts["binary_instrument"] = {
          VerdictStatus::kNotApplicable,
          "needs |Z| = 2 and p(x) = (1, x)"};
    }
  } else {
    report.overall_verdicts["support_cardinality"] = {
        VerdictStatus::kNotApplicable, "no discrete instrument column"};
    report.overall_verdicts["binary_instrument"] = {
        VerdictStatus::kNotApplicable, "no discrete instrument column"};
  }
  return report;
}

}  // namespace hetcoef
