#pragma once

// Experiment configuration, seed-parallel Monte Carlo orchestration, and
// CSV/JSON persistence. The parallelism unit is one (n, seed) cell; workers
// consume an immutable cell list and results are merged in (n, seed) order,
// so aggregates are byte-identical for any worker count.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "girko/charflow.hpp"
#include "girko/ensembles.hpp"
#include "girko/girko.hpp"
#include "girko/resolvent.hpp"
#include "girko/stats.hpp"

namespace girko {

constexpr const char* kSchemaVersion = "1";

struct ExperimentConfig {
    std::map<std::string, std::string> kv; // canonical: sorted keys

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        ExperimentConfig c;
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t\r"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
                return s;
            };
            std::string key = trim(line.substr(0, eq));
            if (!key.empty()) c.kv[key] = trim(line.substr(eq + 1));
        }
        return c;
    }

    std::string get(const std::string& key, const std::string& dflt = "") const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    }
    double get_num(const std::string& key, double dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : std::stod(it->second);
    }
    long get_int(const std::string& key, long dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : std::stol(it->second);
    }
    std::vector<long> get_int_list(const std::string& key,
                                   std::vector<long> dflt) const {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        std::vector<long> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stol(tok));
        return out;
    }
    std::vector<double> get_num_list(const std::string& key,
                                     std::vector<double> dflt) const {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    }

    std::string canonical() const {
        std::string s;
        for (auto& [k, v] : kv) s += k + "=" + v + "\n";
        return s;
    }

    // FNV-1a over the canonical serialization
    std::string hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    EnsembleKind ensemble_kind() const {
        std::string e = get("ensemble", "complex-ginibre");
        if (e == "complex-ginibre") return EnsembleKind::ComplexGinibre;
        if (e == "bernoulli-phase") return EnsembleKind::BernoulliPhase;
        if (e == "uniform-disk") return EnsembleKind::UniformDisk;
        throw std::runtime_error("config: unknown ensemble " + e);
    }
};

struct CellResult {
    std::vector<std::string> rows;           // CSV lines
    std::vector<std::complex<double>> stats; // observables for aggregation
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::string experiment;
    std::string config_hash;
    std::vector<std::string> csv_rows;
    std::string csv_header;
    std::vector<std::complex<double>> observables;
    nlohmann::json summary;
    std::size_t failed_cells = 0;
    std::size_t total_cells = 0;
};

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

template <class Fn>
inline std::vector<CellResult> run_cells(std::size_t count, int workers, Fn&& body) {
    std::vector<CellResult> results(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = body(i);
            } catch (const std::exception& e) {
                results[i].failed = true;
                results[i].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

} // namespace detail

class Runner {
  public:
    Runner(ExperimentConfig cfg, int workers) : cfg_(std::move(cfg)), workers_(workers) {
        if (workers_ <= 0) workers_ = 1;
    }

    ExperimentResult run() {
        const std::string exp = cfg_.get("experiment");
        ExperimentResult r;
        r.experiment = exp;
        r.config_hash = cfg_.hash();
        if (exp == "dyson-table") run_dyson(r);
        else if (exp == "stab-table") run_stab(r);
        else if (exp == "flow-check") run_flow(r);
        else if (exp == "local-law-scan") run_local_law(r);
        else if (exp == "two-resolvent-scan") run_two_resolvent(r);
        else if (exp == "overlap-decay") run_overlap(r);
        else if (exp == "girko-consistency") run_girko(r);
        else if (exp == "clt") run_clt(r);
        else throw std::runtime_error("run: unknown experiment '" + exp + "'");
        return r;
    }

    static void write_outputs(const ExperimentResult& r, const std::string& out_dir) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / (r.experiment + ".csv"));
        csv << "# schema=" << kSchemaVersion << " experiment=" << r.experiment
            << " config_hash=" << r.config_hash << "\n";
        csv << r.csv_header << "\n";
        for (auto& row : r.csv_rows) csv << row << "\n";
        std::ofstream js(fs::path(out_dir) / (r.experiment + ".json"));
        js << r.summary.dump(2) << "\n";
    }

  private:
    ExperimentConfig cfg_;
    int workers_;

    Seed seed_for(long index) const {
        return Seed{static_cast<std::uint64_t>(cfg_.get_int("seed", 1)),
                    static_cast<std::uint64_t>(cfg_.get_int("stream", 0) + index)};
    }

    void merge(ExperimentResult& r, std::vector<CellResult> cells) {
        r.total_cells = cells.size();
        for (auto& c : cells) {
            if (c.failed) {
                ++r.failed_cells;
                continue;
            }
            for (auto& row : c.rows) r.csv_rows.push_back(row);
            for (auto& s : c.stats) r.observables.push_back(s);
        }
        if (r.total_cells > 0 &&
            r.failed_cells * 20 > r.total_cells) // > 5% failures aborts
            throw std::runtime_error("run: more than 5% of cells failed");
        r.summary["experiment"] = r.experiment;
        r.summary["config_hash"] = r.config_hash;
        r.summary["schema"] = kSchemaVersion;
        r.summary["cells"] = r.total_cells;
        r.summary["failed_cells"] = r.failed_cells;
        if (!r.observables.empty()) {
            std::vector<double> mags;
            mags.reserve(r.observables.size());
            for (auto& v : r.observables) mags.push_back(std::abs(v));
            r.summary["obs_max"] = *std::max_element(mags.begin(), mags.end());
            r.summary["obs_median"] = median(mags);
        }
    }

    void run_dyson(ExperimentResult& r) {
        r.csv_header = "z_re,z_im,eta,m_re,m_im,u_re,u_im,residual";
        auto zs = cfg_.get_num_list("z_abs", {0.0, 0.25, 0.5, 0.75, 0.9});
        auto etas = cfg_.get_num_list("eta", {1e-4, 1e-2, 1.0, 1e2});
        std::vector<CellResult> cells = detail::run_cells(
            zs.size(), workers_, [&](std::size_t i) {
                CellResult c;
                for (double eta : etas) {
                    SpectralPoint p{Complex(zs[i], 0.0), eta};
                    ScalarMSolution s = solve_m(p);
                    using detail::fmt;
                    c.rows.push_back(fmt(zs[i]) + ",0," + fmt(eta) + "," +
                                     fmt(s.m.real()) + "," + fmt(s.m.imag()) + "," +
                                     fmt(s.u.real()) + "," + fmt(s.u.imag()) + "," +
                                     fmt(s.residual));
                    c.stats.push_back(s.residual);
                }
                return c;
            });
        merge(r, std::move(cells));
    }

    void run_stab(ExperimentResult& r) {
        r.csv_header =
            "z1_re,z1_im,z2_re,z2_im,eta1,eta2,beta_plus_re,beta_plus_im,"
            "beta_minus_re,beta_minus_im,m12I_re,m12I_im";
        auto dzs = cfg_.get_num_list("dz", {1e-3, 1e-2, 1e-1});
        auto etas = cfg_.get_num_list("eta", {1e-4, 1e-3, 1e-2});
        double zb = cfg_.get_num("z_base", 0.5);
        std::vector<CellResult> cells = detail::run_cells(
            dzs.size(), workers_, [&](std::size_t i) {
                CellResult c;
                for (double eta : etas) {
                    SpectralPoint p1{Complex(zb, 0.0), eta};
                    SpectralPoint p2{Complex(zb, dzs[i]), eta};
                    StabilityPair pr = eigendecompose(p1, p2);
                    Complex tI = trace_m12_I(p1, p2);
                    using detail::fmt;
                    c.rows.push_back(
                        fmt(zb) + ",0," + fmt(zb) + "," + fmt(dzs[i]) + "," +
                        fmt(eta) + "," + fmt(eta) + "," + fmt(pr.betaPlus.real()) +
                        "," + fmt(pr.betaPlus.imag()) + "," +
                        fmt(pr.betaMinus.real()) + "," + fmt(pr.betaMinus.imag()) +
                        "," + fmt(tI.real()) + "," + fmt(tI.imag()));
                }
                return c;
            });
        merge(r, std::move(cells));
    }

    void run_flow(ExperimentResult& r) {
        r.csv_header = "t,z1_re,z1_im,eta1,z2_re,z2_im,eta2,m1_re,m1_im,m2_re,"
                       "m2_im,m12I_re,m12I_im,bound";
        double z1 = cfg_.get_num("z1", 0.3), z2 = cfg_.get_num("z2", 0.32);
        double eta1 = cfg_.get_num("eta1", 0.05), eta2 = cfg_.get_num("eta2", -0.05);
        long steps = cfg_.get_int("steps", 20);
        FlowState s0 = make_flow_state({Complex(z1, 0), eta1}, {Complex(z2, 0), eta2});
        double tmax = cfg_.get_num(
            "t_max", 0.8 * std::min(max_time(s0.c1.p), max_time(s0.c2.p)));
        M12BoundCoeffs bc0 = m12_bound_coeffs(s0);
        std::vector<CellResult> cells = detail::run_cells(
            static_cast<std::size_t>(steps + 1), workers_, [&](std::size_t i) {
                CellResult c;
                double t = tmax * static_cast<double>(i) / steps;
                FlowState s = flow_closed_form(s0, t);
                Complex tI = trace_m12_I(s.c1.p, s.c2.p);
                double denom = bc0.b0 - bc0.a0 * t;
                double bound = denom > 0 ? bc0.a0 / denom : -1.0;
                using detail::fmt;
                c.rows.push_back(
                    fmt(t) + "," + fmt(s.c1.p.z.real()) + "," + fmt(s.c1.p.z.imag()) +
                    "," + fmt(s.c1.p.eta) + "," + fmt(s.c2.p.z.real()) + "," +
                    fmt(s.c2.p.z.imag()) + "," + fmt(s.c2.p.eta) + "," +
                    fmt(s.c1.m.real()) + "," + fmt(s.c1.m.imag()) + "," +
                    fmt(s.c2.m.real()) + "," + fmt(s.c2.m.imag()) + "," +
                    fmt(tI.real()) + "," + fmt(tI.imag()) + "," + fmt(bound));
                c.stats.push_back(tI);
                return c;
            });
        merge(r, std::move(cells));
    }

    void run_local_law(ExperimentResult& r) {
        r.csv_header = "n,seed,z_re,z_im,eta,error,n_eta_error";
        auto ns = cfg_.get_int_list("n", {64, 128});
        long seeds = cfg_.get_int("seeds", 20);
        double z = cfg_.get_num("z", 0.5);
        double eta = cfg_.get_num("eta", 0.05);
        EnsembleKind kind = cfg_.ensemble_kind();
        struct Cell { long n, seed; };
        std::vector<Cell> cells_def;
        for (long n : ns)
            for (long s = 0; s < seeds; ++s) cells_def.push_back({n, s});
        auto cells = detail::run_cells(cells_def.size(), workers_, [&](std::size_t i) {
            auto [n, s] = cells_def[i];
            CellResult c;
            ComplexMatrix X = sample_iid({kind, static_cast<int>(n)}, seed_for(s));
            SingleLawError e = single_law_error(X, {Complex(z, 0), eta}, basis::I());
            using detail::fmt;
            c.rows.push_back(std::to_string(n) + "," + std::to_string(s) + "," +
                             fmt(z) + ",0," + fmt(eta) + "," + fmt(e.error) + "," +
                             fmt(e.normalized));
            c.stats.push_back(e.normalized);
            return c;
        });
        merge(r, std::move(cells));
    }

    void run_two_resolvent(ExperimentResult& r) {
        r.csv_header = "n,seed,z1_re,z2_re,z2_im,eta,error,bound";
        auto ns = cfg_.get_int_list("n", {128, 256});
        long seeds = cfg_.get_int("seeds", 50);
        double z1 = cfg_.get_num("z1", 0.5);
        auto dzs = cfg_.get_num_list("dz", {0.01, 0.1});
        EnsembleKind kind = cfg_.ensemble_kind();
        struct Cell { long n, seed; };
        std::vector<Cell> cells_def;
        for (long n : ns)
            for (long s = 0; s < seeds; ++s) cells_def.push_back({n, s});
        auto cells = detail::run_cells(cells_def.size(), workers_, [&](std::size_t i) {
            auto [n, s] = cells_def[i];
            CellResult c;
            ComplexMatrix X = sample_iid({kind, static_cast<int>(n)}, seed_for(s));
            double eta = cfg_.get_num("eta", 1.0 / std::sqrt(static_cast<double>(n)));
            for (double dz : dzs) {
                SpectralPoint p1{Complex(z1, 0), eta};
                SpectralPoint p2{Complex(z1, dz), eta};
                TwoResolventError e = two_resolvent_error(X, p1, p2, basis::I(),
                                                          basis::I());
                using detail::fmt;
                c.rows.push_back(std::to_string(n) + "," + std::to_string(s) + "," +
                                 fmt(z1) + "," + fmt(z1) + "," + fmt(dz) + "," +
                                 fmt(eta) + "," + fmt(e.error) + "," +
                                 fmt(e.predicted_bound));
                c.stats.push_back(e.error);
            }
            return c;
        });
        merge(r, std::move(cells));
    }

    void run_overlap(ExperimentResult& r) {
        r.csv_header = "n,seed,dz,median_overlap";
        long n = cfg_.get_int("n", 512);
        long seeds = cfg_.get_int("seeds", 30);
        long k = cfg_.get_int("k", 3);
        double z1 = cfg_.get_num("z1", 0.3);
        EnsembleKind kind = cfg_.ensemble_kind();
        std::vector<double> dzs = cfg_.get_num_list(
            "dz", {std::pow(n, -0.5), std::pow(n, -0.375), std::pow(n, -0.25)});
        auto cells = detail::run_cells(
            static_cast<std::size_t>(seeds), workers_, [&](std::size_t s) {
                CellResult c;
                ComplexMatrix X = sample_iid({kind, static_cast<int>(n)},
                                             seed_for(static_cast<long>(s)));
                for (double dz : dzs) {
                    Eigen::MatrixXd O = overlap_matrix(X, Complex(z1, 0),
                                                       Complex(z1 + dz, 0),
                                                       static_cast<int>(k));
                    std::vector<double> vals(O.data(), O.data() + O.size());
                    double med = median(vals);
                    using detail::fmt;
                    c.rows.push_back(std::to_string(n) + "," + std::to_string(s) +
                                     "," + fmt(dz) + "," + fmt(med));
                    c.stats.push_back(med);
                }
                return c;
            });
        merge(r, std::move(cells));
    }

    void run_girko(ExperimentResult& r) {
        r.csv_header = "n,seed,resolution,direct,girko,rel_discrepancy,flagged";
        long n = cfg_.get_int("n", 32);
        long seeds = cfg_.get_int("seeds", 1);
        auto resolutions = cfg_.get_int_list("resolution", {128});
        EnsembleKind kind = cfg_.ensemble_kind();
        double a = cfg_.get_num("a", 0.0);
        auto cells = detail::run_cells(
            static_cast<std::size_t>(seeds), workers_, [&](std::size_t s) {
                CellResult c;
                ComplexMatrix X = sample_iid({kind, static_cast<int>(n)},
                                             seed_for(static_cast<long>(s)));
                for (long res : resolutions) {
                    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0,
                                                         a, static_cast<int>(n),
                                                         static_cast<int>(res), 0.5);
                    double direct = linear_statistic(X, tf);
                    GirkoResult g = girko_rhs(X, tf, 100.0);
                    using detail::fmt;
                    double rel = std::abs(g.value - direct) / std::abs(direct);
                    c.rows.push_back(std::to_string(n) + "," + std::to_string(s) +
                                     "," + std::to_string(res) + "," + fmt(direct) +
                                     "," + fmt(g.value) + "," + fmt(rel) + "," +
                                     std::to_string(g.flagged_nodes));
                    c.stats.push_back(rel);
                }
                return c;
            });
        merge(r, std::move(cells));
    }

    void run_clt(ExperimentResult& r) {
        r.csv_header = "n,seed,L_re,L_im";
        long n = cfg_.get_int("n", 256);
        long seeds = cfg_.get_int("seeds", 500);
        double a = cfg_.get_num("a", 0.25);
        long res = cfg_.get_int("resolution", 128);
        double z0 = cfg_.get_num("z0", 0.0);
        EnsembleKind kind = cfg_.ensemble_kind();
        TestFunction tf = make_test_function(Profile::MollifierBump, Complex(z0, 0), a,
                                             static_cast<int>(n),
                                             static_cast<int>(res), 0.5);
        auto cells = detail::run_cells(
            static_cast<std::size_t>(seeds), workers_, [&](std::size_t s) {
                CellResult c;
                ComplexMatrix X = sample_iid({kind, static_cast<int>(n)},
                                             seed_for(static_cast<long>(s)));
                double L = linear_statistic(X, tf);
                using detail::fmt;
                c.rows.push_back(std::to_string(n) + "," + std::to_string(s) + "," +
                                 fmt(L) + ",0");
                c.stats.push_back(L);
                return c;
            });
        merge(r, std::move(cells));
        if (r.observables.size() >= 2) {
            Moments m = summarize(r.observables);
            CLTPrediction pred = clt_prediction(tf, kappa4({kind, 0}), // kappa4 ignores n
                                                static_cast<int>(n));
            r.summary["sample_mean"] = {m.mean.real(), m.mean.imag()};
            r.summary["sample_variance"] = m.variance;
            r.summary["pseudo_variance"] = {m.pseudo_variance.real(),
                                            m.pseudo_variance.imag()};
            r.summary["kurtosis_re"] = m.kurtosis_re;
            r.summary["kurtosis_im"] = m.kurtosis_im;
            r.summary["predicted_mean"] = {pred.mean.real(), pred.mean.imag()};
            r.summary["predicted_variance"] = pred.variance;
            r.summary["z_mean"] =
                std::abs(m.mean - pred.mean) / std::max(m.se_mean, 1e-300);
            r.summary["z_variance"] = std::abs(m.variance - pred.variance) /
                                      std::max(m.se_variance, 1e-300);
            r.summary["z_kurtosis_re"] = std::abs(m.kurtosis_re) / m.se_kurtosis;
            r.summary["z_kurtosis_im"] = std::abs(m.kurtosis_im) / m.se_kurtosis;
        }
    }
};

} // namespace girko
