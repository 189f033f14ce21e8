// cornerq: run corner/reflection scenarios and write summary.json plus CSV tables.
//
//   cornerq run scenario.json --out out/ [--trunc-order N] [--seed S]
//   cornerq run --batch scenarios/ --out out/
//
// Exit status: 0 all checks pass, 1 some check failed, 2 schema error, 3 scenario error.

#include <algorithm>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "cornerq/cli.hpp"

namespace fs = std::filesystem;
using namespace cornerq;

namespace {

struct Outcome {
    int code;
    std::string message;
};

Outcome run_one(const fs::path& file, const fs::path& out, const cli::RunOptions& opt) {
    try {
        const cli::Report rep = cli::run_file(file, opt);
        cli::write_report(rep, out);
        std::string msg = file.string() + ": " + (rep.passed() ? "PASS" : "FAIL");
        for (const auto& c : rep.checks)
            if (!c.pass) msg += "\n  failed " + c.invariant + " (" + cli::format_double(c.value) + " > " +
                                cli::format_double(c.tolerance) + ")";
        return {rep.passed() ? 0 : 1, msg};
    } catch (const schema_error& e) {
        return {2, std::string("schema error: ") + e.what()};
    } catch (const scenario_error& e) {
        return {3, std::string("scenario error: ") + e.what()};
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Harmonic corner expansions and iterated reflection"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "Run a scenario file or a directory of them");
    std::string file, batch, out;
    std::optional<std::size_t> order;
    std::optional<std::uint64_t> seed;
    auto* file_opt = run->add_option("file", file, "Scenario JSON file");
    auto* batch_opt = run->add_option("--batch", batch, "Run every *.json in a directory")->check(CLI::ExistingDirectory);
    file_opt->excludes(batch_opt);
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--trunc-order", order, "Series truncation order")->check(CLI::Range(1, 512));
    run->add_option("--seed", seed, "Override the scenario seed");
    CLI11_PARSE(app, argc, argv);

    if (file.empty() && batch.empty()) {
        std::cerr << "run: give a scenario file or --batch <dir>\n";
        return 2;
    }
    const cli::RunOptions opt{order, seed};
    if (!file.empty()) {
        const Outcome o = run_one(file, out, opt);
        (o.code == 0 ? std::cout : std::cerr) << o.message << '\n';
        return o.code;
    }

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(batch))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::future<Outcome>> jobs;
    for (const auto& f : files)
        jobs.push_back(std::async(std::launch::async, run_one, f, fs::path(out) / f.stem(), opt));
    int code = 0;
    for (auto& j : jobs) {
        const Outcome o = j.get();
        std::cout << o.message << '\n';
        code = std::max(code, o.code);
    }
    return code;
}
