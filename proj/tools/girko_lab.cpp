// girko-lab: command line front end for the experiment runner. Each
// subcommand selects one experiment; a config file supplies parameters and
// optional pass/fail thresholds checked against the JSON summary.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "girko/harness.hpp"

namespace {

int default_workers() {
    if (const char* env = std::getenv("GIRKO_LAB_WORKERS"))
        return std::max(1, std::atoi(env));
    return std::max(1u, std::thread::hardware_concurrency());
}

// thresholds named max_<field> in the config are compared against the
// numeric summary fields; any violation fails the run
bool check_thresholds(const girko::ExperimentConfig& cfg, const nlohmann::json& summary) {
    bool ok = true;
    for (const auto& [key, val] : cfg.kv) {
        if (key.rfind("max_", 0) != 0) continue;
        std::string field = key.substr(4);
        if (!summary.contains(field)) {
            std::cerr << "threshold " << key << ": summary has no field '" << field
                      << "'\n";
            ok = false;
            continue;
        }
        double limit = std::stod(val);
        double got = summary[field].get<double>();
        if (!(got <= limit)) {
            std::cerr << "FAIL " << field << " = " << got << " > " << limit << "\n";
            ok = false;
        } else {
            std::cout << "pass " << field << " = " << got << " <= " << limit << "\n";
        }
    }
    return ok;
}

void emit_plot_script(const girko::ExperimentResult& r, const std::string& out_dir) {
    std::ofstream py(std::filesystem::path(out_dir) / (r.experiment + "_plot.py"));
    py << "#!/usr/bin/env python3\n"
          "import csv, sys\n"
          "import matplotlib.pyplot as plt\n"
          "rows = list(csv.DictReader(open('" << r.experiment << ".csv'), ))\n"
          "# first line is a comment header; DictReader sees it as fieldnames,\n"
          "# so re-read skipping it\n"
          "import io\n"
          "lines = open('" << r.experiment << ".csv').read().splitlines()\n"
          "rows = list(csv.DictReader(io.StringIO('\\n'.join(lines[1:]))))\n"
          "cols = rows[0].keys() if rows else []\n"
          "num = [c for c in cols if c not in ('n', 'seed')]\n"
          "if len(num) >= 2:\n"
          "    x = [float(r[num[0]]) for r in rows]\n"
          "    y = [float(r[num[-1]]) for r in rows]\n"
          "    plt.scatter(x, y, s=8)\n"
          "    plt.xlabel(num[0]); plt.ylabel(num[-1])\n"
          "    plt.savefig('" << r.experiment << ".png', dpi=150)\n"
          "    print('wrote " << r.experiment << ".png')\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for non-Hermitian spectral statistics"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int workers = default_workers();
    long seeds_override = -1;
    bool plot_script = false;

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"dyson", "tabulate the scalar Dyson equation solution m(z, eta)"},
        {"stab", "tabulate stability-operator eigenvalues and <M12^I>"},
        {"flow", "trace a characteristic-flow trajectory"},
        {"local-law", "single-resolvent local law error scan"},
        {"overlap", "singular-vector overlap decay"},
        {"clt", "Monte Carlo linear-statistics CLT"},
        {"girko", "Girko-formula consistency check"},
        {"run", "run the experiment named in the config file"},
    };
    std::map<std::string, CLI::App*> cmd;
    for (auto& [name, desc] : subs) {
        CLI::App* c = app.add_subcommand(name, desc);
        c->add_option("--config", config_path, "key=value config file");
        c->add_option("--seeds", seeds_override, "override seed count");
        c->add_option("--workers", workers, "worker thread count");
        c->add_option("--out", out_dir, "output directory");
        c->add_flag("--emit-plot-script", plot_script,
                    "write a matplotlib script next to the CSV");
        cmd[name] = c;
    }
    CLI11_PARSE(app, argc, argv);

    const std::map<std::string, std::string> experiment_of = {
        {"dyson", "dyson-table"},        {"stab", "stab-table"},
        {"flow", "flow-check"},          {"local-law", "local-law-scan"},
        {"overlap", "overlap-decay"},    {"clt", "clt"},
        {"girko", "girko-consistency"},
    };

    try {
        girko::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = girko::ExperimentConfig::from_file(config_path);
        for (auto& [name, c] : cmd) {
            if (!c->parsed()) continue;
            if (name == "run") {
                if (cfg.get("experiment").empty())
                    throw std::runtime_error("run: config must set experiment=");
            } else {
                cfg.kv["experiment"] = experiment_of.at(name);
            }
        }
        if (seeds_override >= 0) cfg.kv["seeds"] = std::to_string(seeds_override);

        girko::Runner runner(cfg, workers);
        girko::ExperimentResult r = runner.run();
        girko::Runner::write_outputs(r, out_dir);
        if (plot_script) emit_plot_script(r, out_dir);

        std::cout << "experiment=" << r.experiment << " cells=" << r.total_cells
                  << " failed=" << r.failed_cells << " rows=" << r.csv_rows.size()
                  << " config_hash=" << r.config_hash << "\n";
        if (!check_thresholds(cfg, r.summary)) return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
