#include "raven/export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "raven/error.hpp"

namespace raven {

namespace fs = std::filesystem;

namespace {

class CsvWriter {
public:
    explicit CsvWriter(std::string_view header) { out_ << header << '\n'; }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    static std::string cell(double x) { return format_real(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(unsigned long long x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }

    std::ostringstream out_;
};

}  // namespace

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::size_t> name_order(const std::vector<std::string>& names) {
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    return order;
}

void write_file(const fs::path& dir, std::string_view name, std::string_view content) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    }
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

void export_experiment(const ExperimentResult& r, const fs::path& dir) {
    CsvWriter summary("policy,metric,mean,stddev,n_trials");
    CsvWriter curves("policy,trial,step,cum_regret,cum_reward");
    CsvWriter trials("policy,trial,cum_reward,cum_regret,suboptimal_pulls,seed");
    for (std::size_t p : name_order(r.policies)) {
        const std::string& name = r.policies[p];
        const PolicyAggregate& a = r.aggregates[p];
        summary.row(name, std::string("cum_reward"), a.cum_reward.mean, a.cum_reward.stddev,
                    r.n_trials);
        summary.row(name, std::string("cum_regret"), a.cum_regret.mean, a.cum_regret.stddev,
                    r.n_trials);
        summary.row(name, std::string("suboptimal_pulls"), a.suboptimal_pulls.mean,
                    a.suboptimal_pulls.stddev, r.n_trials);
        for (std::size_t i = 0; i < r.trials[p].size(); ++i) {
            const TrialSummary& s = r.trials[p][i];
            for (const CurvePoint& c : s.curve) {
                curves.row(name, i, c.step, c.cum_regret, c.cum_reward);
            }
            trials.row(name, i, s.cum_reward, s.cum_regret, s.suboptimal_pulls,
                       static_cast<unsigned long long>(s.seed));
        }
    }
    write_file(dir, "summary.csv", summary.str());
    write_file(dir, "curves.csv", curves.str());
    write_file(dir, "trials.csv", trials.str());
}

void export_sweep(const SweepResult& result, const fs::path& dir) {
    CsvWriter csv("scenario,horizon,alpha0,beta0,mean_regret,std_regret");
    for (const SweepCell& c : result.cells) {
        csv.row(c.scenario, c.horizon, c.alpha0, c.beta0, c.mean_regret, c.std_regret);
    }
    write_file(dir, "sweep.csv", csv.str());
}

void export_scaling(const RegretScalingReport& report, const fs::path& dir) {
    const std::vector<const ScalingSeries*> series = {&report.baseline, &report.candidate};
    const std::vector<std::string> names = {report.baseline.policy, report.candidate.policy};
    const std::vector<std::size_t> order = name_order(names);

    CsvWriter rows("horizon,policy,mean_regret,mean_suboptimal_pulls,reduction_pct");
    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
        for (std::size_t p : order) {
            // The baseline's reduction against itself is 0 by definition.
            const double reduction = p == 0 ? 0.0 : report.reduction_pct[h];
            rows.row(report.horizons[h], names[p], series[p]->mean_regret[h],
                     series[p]->mean_suboptimal[h], reduction);
        }
    }
    CsvWriter fit("policy,slope,intercept,r_squared");
    for (std::size_t p : order) {
        const LinearFit& f = series[p]->pulls_vs_log_t;
        fit.row(names[p], f.slope, f.intercept, f.r_squared);
    }
    write_file(dir, "scaling.csv", rows.str());
    write_file(dir, "scaling_fit.csv", fit.str());
}

void export_tune(const TuneResult& result, const fs::path& dir) {
    CsvWriter csv("candidate,alpha0,beta0,epsilon,mean_regret");
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        const TuneCandidate& c = result.candidates[i];
        csv.row(i, c.config.alpha0, c.config.beta0, c.config.epsilon, c.mean_regret);
    }
    write_file(dir, "tune.csv", csv.str());
}

void export_moments(const std::vector<MomentsRow>& rows, const fs::path& dir) {
    CsvWriter csv("sample_size,trial,mean,variance");
    for (const MomentsRow& r : rows) {
        csv.row(r.sample_size, r.trial, r.mean, r.variance);
    }
    write_file(dir, "moments.csv", csv.str());
}

}  // namespace raven
