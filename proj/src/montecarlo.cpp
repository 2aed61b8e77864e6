#include "hetcoef/montecarlo.hpp"

#include <cmath>
#include <ostream>

#include "hetcoef/control.hpp"
#include "hetcoef/errors.hpp"
#include "hetcoef/estimator.hpp"
#include "hetcoef/parallel.hpp"

namespace hetcoef {

namespace {

constexpr std::uint64_t kHoldoutSeedSalt = 0x9E3779B97F4A7C15ull;

BasisSpec make_psi(BasisKind kind, int k) {
  switch (kind) {
    case BasisKind::kIndicator:
      return BasisSpec::Indicator(k);
    case BasisKind::kPower:
      return BasisSpec::Power(k);
    case BasisKind::kBspline:
      return BasisSpec::Bspline(k, 0.0, 1.0);
    default:
      throw DataError("psi basis must be indicator, power, or bspline");
  }
}

ControlEstimate control_for(const Dataset& data) {
  if (data.v) return passthrough_control(data);
  return estimate_control(data);
}

struct Target {
  std::string name;
  double truth;
  bool is_ate;
  int ate_index;   // arm for ate targets
  double x_value;  // evaluation point for asf targets
};

std::vector<Target> make_targets(const McConfig& config) {
  std::vector<Target> targets;
  const GroundTruth truth = ground_truth(config.dgp);
  const bool scalar_x = config.p_spec.kind == BasisKind::kPower ||
                        config.p_spec.kind == BasisKind::kBspline;
  if (scalar_x) {
    for (double x : config.x_grid) {
      Target t;
      t.name = "asf@" + std::to_string(x);
      t.truth = true_asf(truth, x);
      t.is_ate = false;
      t.ate_index = -1;
      t.x_value = x;
      targets.push_back(std::move(t));
    }
  }
  if (truth.ate &&
      (config.p_spec.kind == BasisKind::kPower ||
       config.p_spec.kind == BasisKind::kTreatmentDummies)) {
    for (Eigen::Index a = 0; a < truth.ate->size(); ++a) {
      Target t;
      t.name = "ate" + std::to_string(a + 1);
      t.truth = (*truth.ate)[a];
      t.is_ate = true;
      t.ate_index = static_cast<int>(a);
      t.x_value = 0.0;
      targets.push_back(std::move(t));
    }
  }
  if (targets.empty())
    throw DataError(
        "no targets: provide an x grid or use a treatment design");
  return targets;
}

struct RepOutcome {
  bool ok = false;
  double gram_min = 0.0;
  std::vector<double> estimates;
};

}  // namespace

void McConfig::validate() const {
  dgp.validate();
  p_spec.validate();
  if (replications < 1) throw DataError("replications must be >= 1");
  if (n_grid.empty()) throw DataError("n_grid must be nonempty");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw DataError("n_grid must be strictly increasing");
  if (k_grid.empty()) throw DataError("k_grid must be nonempty");
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (k_grid[i] <= k_grid[i - 1])
      throw DataError("k_grid must be strictly increasing");
  if (ridge < 0.0) throw DataError("ridge must be >= 0");
  if (holdout_n < 1) throw DataError("holdout_n must be >= 1");
  make_psi(psi_kind, k_grid.front());
}

McReport run(const McConfig& config) {
  config.validate();
  const std::vector<Target> targets = make_targets(config);
  const int reps = config.replications;

  McReport report;
  for (const Eigen::Index n : config.n_grid) {
    for (const int k : config.k_grid) {
      const BasisSpec psi = make_psi(config.psi_kind, k);
      std::vector<RepOutcome> outcomes(reps);
      parallel_for(reps, config.threads, [&](int r) {
        const std::uint64_t seed =
            config.base_seed + static_cast<std::uint64_t>(r);
        auto [data, truth] = simulate(config.dgp, n, seed);
        RepOutcome& out = outcomes[r];
        try {
          const ControlEstimate control = control_for(data);
          const FittedModel model =
              fit(data, control, config.p_spec, psi, config.ridge);
          out.gram_min = model.gram_min_eigenvalue;
          out.estimates.reserve(targets.size());
          Eigen::VectorXd ate_hat;
          for (const Target& t : targets) {
            if (t.is_ate) {
              if (ate_hat.size() == 0) ate_hat = ate(model, control);
              out.estimates.push_back(ate_hat[t.ate_index]);
            } else {
              out.estimates.push_back(asf(model, control, t.x_value));
            }
          }
          out.ok = true;
        } catch (const IdentificationError&) {
          out.ok = false;
        }
      });

      for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        McCell cell;
        cell.n = n;
        cell.k = k;
        cell.target = targets[ti].name;
        cell.truth = targets[ti].truth;
        double sum = 0.0, sum_sq_err = 0.0, sum_gram = 0.0;
        int ok_count = 0;
        for (const RepOutcome& out : outcomes) {
          if (!out.ok) continue;
          ++ok_count;
          const double est = out.estimates[ti];
          sum += est;
          const double err = est - cell.truth;
          sum_sq_err += err * err;
          sum_gram += out.gram_min;
        }
        cell.successes = ok_count;
        cell.failures = reps - ok_count;
        if (ok_count > 0) {
          cell.mean_estimate = sum / ok_count;
          cell.bias = cell.mean_estimate - cell.truth;
          cell.rmse = std::sqrt(sum_sq_err / ok_count);
          cell.mean_gram_min_eigenvalue = sum_gram / ok_count;
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

McReport approximation_study(const McConfig& config) {
  config.validate();
  DgpConfig dgp = config.dgp;
  dgp.emit_v = true;  // holdout evaluation needs the true control values
  const Eigen::Index n_train = config.n_grid.back();
  const int reps = config.replications;

  McReport report;
  for (const int k : config.k_grid) {
    const BasisSpec psi = make_psi(config.psi_kind, k);
    struct StudyOutcome {
      bool ok = false;
      double holdout = 0.0, insample = 0.0, gram_min = 0.0;
    };
    std::vector<StudyOutcome> outcomes(reps);
    parallel_for(reps, config.threads, [&](int r) {
      const std::uint64_t seed =
          config.base_seed + static_cast<std::uint64_t>(r);
      auto [train, truth] = simulate(dgp, n_train, seed);
      StudyOutcome& out = outcomes[r];
      try {
        const ControlEstimate control = control_for(train);
        const FittedModel model =
            fit(train, control, config.p_spec, psi, config.ridge);
        out.gram_min = model.gram_min_eigenvalue;
        out.insample = in_sample_mse(model, train, control);

        auto [holdout, holdout_truth] =
            simulate(dgp, config.holdout_n,
                     (seed ^ kHoldoutSeedSalt) + 1);
        double total = 0.0;
        for (Eigen::Index i = 0; i < holdout.n(); ++i) {
          const Eigen::VectorXd x = holdout.x.row(i).transpose();
          const double v = (*holdout.v)[i];
          const double diff =
              true_crf(dgp, x, v) - predict_crf(model, x, v);
          total += diff * diff;
        }
        out.holdout = total / static_cast<double>(holdout.n());
        out.ok = true;
      } catch (const IdentificationError&) {
        out.ok = false;
      }
    });

    McCell cell;
    cell.n = n_train;
    cell.k = k;
    cell.target = "crf";
    double sum_holdout = 0.0, sum_insample = 0.0, sum_gram = 0.0;
    int ok_count = 0;
    for (const StudyOutcome& out : outcomes) {
      if (!out.ok) continue;
      ++ok_count;
      sum_holdout += out.holdout;
      sum_insample += out.insample;
      sum_gram += out.gram_min;
    }
    cell.successes = ok_count;
    cell.failures = reps - ok_count;
    if (ok_count > 0) {
      cell.holdout_mse = sum_holdout / ok_count;
      cell.insample_mse = sum_insample / ok_count;
      cell.mean_gram_min_eigenvalue = sum_gram / ok_count;
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void write_mc_report_csv(const McReport& report, std::ostream& out) {
  out << "n,k,target,truth,mean_estimate,bias,rmse,"
         "mean_gram_min_eigenvalue,failures,successes,holdout_mse,"
         "insample_mse\n";
  auto put = [&out](double value) {
    if (std::isnan(value)) {
      out << "";
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      out << buf;
    }
  };
  for (const McCell& cell : report.cells) {
    out << cell.n << ',' << cell.k << ',' << cell.target << ',';
    put(cell.truth);
    out << ',';
    put(cell.mean_estimate);
    out << ',';
    put(cell.bias);
    out << ',';
    put(cell.rmse);
    out << ',';
    put(cell.mean_gram_min_eigenvalue);
    out << ',' << cell.failures << ',' << cell.successes << ',';
    put(cell.holdout_mse);
    out << ',';
    put(cell.insample_mse);
    out << '\n';
  }
}

}  // namespace hetcoef
