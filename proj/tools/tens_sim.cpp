// Command-line front end: simulate scenarios, write phantoms, validate meshes, compare reports.

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tens/error.hpp"
#include "tens/nastran.hpp"
#include "tens/scenario.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNonConvergence = 3,
    kConservationFailure = 4,
};

int classify(const std::exception& e)
{
    if (dynamic_cast<const tens::ConfigError*>(&e)) {
        return kConfigError;
    }
    if (dynamic_cast<const tens::SolverError*>(&e)) {
        return kNonConvergence;
    }
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        return classify(inner);
    }
    return kFailure;
}

int simulate(const std::string& config, const std::string& only, unsigned threads)
{
    std::vector<tens::Scenario> scenarios;
    try {
        scenarios = tens::load_config(config);
    } catch (const tens::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (!only.empty()) {
        std::erase_if(scenarios, [&](const tens::Scenario& s) { return s.label != only; });
        if (scenarios.empty()) {
            std::cerr << "config error: no scenario labelled '" << only << "'\n";
            return kConfigError;
        }
    }

    threads = std::max(1u, threads);
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size()));
    const unsigned inner = std::max(1u, threads / workers);

    std::vector<int> codes(scenarios.size(), kOk);
    std::vector<std::string> lines(scenarios.size());
    std::atomic<std::size_t> next{0};
    std::mutex print;
    auto work = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            std::ostringstream os;
            try {
                const auto r = tens::run_scenario(scenarios[i], inner);
                os << r.label << ": " << r.iterations << " PCG iterations, residual " << r.relative_residual
                   << ", injected " << r.injected_current << " A, anode flux " << r.anode_flux
                   << " A, cathode flux " << r.cathode_flux << " A, leakage " << r.leakage << " A\n"
                   << "  element-wise J: anode " << r.element_anode_flux << " A, cathode " << r.element_cathode_flux
                   << " A, leakage " << r.element_leakage << " A\n";
                for (const auto& reg : r.regions) {
                    os << "  " << reg.region << ": max |J| " << reg.max_j << " A/m^2 at (" << reg.argmax.x << ", "
                       << reg.argmax.y << ", " << reg.argmax.z << ") mm, mean " << reg.mean_j << " A/m^2\n";
                }
                if (r.combined_circuits) {
                    os << "  note: several anodes share one ground; combined runs approximate separate circuits\n";
                }
                if (!r.conservation_ok) {
                    os << "  conservation check FAILED: imbalance " << r.imbalance * 100.0 << "% of injected current\n";
                    codes[i] = kConservationFailure;
                }
            } catch (const std::exception& e) {
                os << scenarios[i].label << ": error: " << e.what() << '\n';
                codes[i] = classify(e);
            }
            std::lock_guard lock(print);
            std::cout << os.str() << std::flush;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }

    int code = kOk;
    for (int c : codes) {
        if (c != kOk && (code == kOk || c < code)) {
            code = c;
        }
    }
    return code;
}

int write_phantom(const std::string& spec_path, const std::string& out_path)
{
    std::ifstream in(spec_path);
    if (!in) {
        std::cerr << "cannot open " << spec_path << '\n';
        return kConfigError;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    tens::PhantomMesh pm;
    try {
        pm = tens::make_phantom(tens::parse_phantom_spec(ss.str()));
    } catch (const tens::ConfigError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return kConfigError;
    }
    tens::write_nastran(out_path, pm.mesh);
    std::cout << "wrote " << pm.mesh.node_count() << " nodes, " << pm.mesh.element_count() << " elements to "
              << out_path << '\n';
    for (const auto& [name, box] : pm.patches) {
        std::cout << "  patch " << name << ": min (" << box.min.x << ", " << box.min.y << ", " << box.min.z
                  << ") max (" << box.max.x << ", " << box.max.y << ", " << box.max.z << ")\n";
    }
    return kOk;
}

int validate(const std::string& path, const std::string& region_map)
{
    tens::NastranDiagnostics diag;
    tens::Mesh mesh = tens::read_nastran(path, &diag);
    if (!region_map.empty()) {
        mesh = mesh.with_region_names(tens::read_region_map(region_map));
    }
    const auto report = tens::validate_mesh(mesh);
    std::cout << report.summary() << '\n';
    for (const auto& [id, name] : mesh.region_names()) {
        std::cout << "  region " << id << ": " << name << '\n';
    }
    if (diag.quadratic_tets) {
        std::cout << "  " << diag.quadratic_tets << " 10-node CTETRA reduced to corner nodes\n";
    }
    if (diag.reoriented) {
        std::cout << "  " << diag.reoriented << " CTETRA reoriented to positive volume\n";
    }
    for (const auto& [card, count] : diag.skipped) {
        std::cout << "  warning: skipped " << count << " unsupported " << card << " card(s)\n";
    }
    for (const auto& d : report.defects) {
        std::cout << "  " << tens::to_string(d.kind);
        for (auto id : d.ids) {
            std::cout << ' ' << id;
        }
        std::cout << '\n';
    }
    return report.ok() ? kOk : kFailure;
}

int compare(const std::vector<std::string>& paths)
{
    std::vector<tens::LabelledReports> reports;
    for (const auto& p : paths) {
        reports.push_back(tens::read_report_json(p));
    }
    tens::compare_reports(reports).write_csv(std::cout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Volume-conductor current-density simulator for transcutaneous nasal-bridge stimulation"};
    app.require_subcommand(1);

    std::string config, only;
    unsigned threads = 1;
    auto* sim = app.add_subcommand("simulate", "run the scenarios of a JSON config");
    sim->add_option("config", config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--only", only, "run only the scenario with this label");
    sim->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    std::string spec, out;
    auto* phantom = app.add_subcommand("phantom", "phantom generation");
    phantom->require_subcommand(1);
    auto* pwrite = phantom->add_subcommand("write", "write a generated phantom as NASTRAN bulk data");
    pwrite->add_option("spec", spec, "phantom spec (JSON)")->required()->check(CLI::ExistingFile);
    pwrite->add_option("out", out, "output .nas file")->required();

    std::string mesh_path, region_map;
    auto* val = app.add_subcommand("validate", "parse and validate a NASTRAN mesh");
    val->add_option("mesh", mesh_path, "NASTRAN bulk data file")->required()->check(CLI::ExistingFile);
    val->add_option("--region-map", region_map, "JSON map of property id to region name")
        ->check(CLI::ExistingFile);

    std::vector<std::string> reports;
    auto* report = app.add_subcommand("report", "report utilities");
    report->require_subcommand(1);
    auto* cmp = report->add_subcommand("compare", "tabulate max |J| per region across scenario reports");
    cmp->add_option("reports", reports, "scenario report JSON files")->required()->expected(2, -1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*sim) {
            return simulate(config, only, threads);
        }
        if (*pwrite) {
            return write_phantom(spec, out);
        }
        if (*val) {
            return validate(mesh_path, region_map);
        }
        if (*cmp) {
            return compare(reports);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
    return kFailure;
}
