#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "subpert/commands.hpp"

int main(int argc, char** argv) {
    using namespace subpert;

    CLI::App app{"Spectral subspace perturbation bounds for Hermitian matrices"};
    app.require_subcommand(1);

    std::string problem_path;
    VerifyOptions verify;
    auto* analyze = app.add_subcommand("analyze", "Check every applicable bound on a problem file");
    analyze->add_option("file", problem_path, "Problem file (JSON)")->required();
    analyze->add_option("--tol", verify.tolerance, "Absolute slack on bound comparisons")
        ->capture_default_str();

    double x_min = 0.0;
    double x_max = c_crit();
    int points = 101;
    auto* table = app.add_subcommand("bound-table", "Emit CSV samples of N(x)");
    table->add_option("--min", x_min, "Smallest x")->required();
    table->add_option("--max", x_max, "Largest x (at most c_crit)")->required();
    table->add_option("--points", points, "Number of grid points")->required();

    cli::FuzzOptions fuzz_opts;
    std::string layout = "mixed";
    auto* fuzz = app.add_subcommand("fuzz", "Run a randomized verification campaign");
    fuzz->add_option("--n", fuzz_opts.n, "Matrix dimension")->required();
    fuzz->add_option("--count", fuzz_opts.count, "Number of instances")->required();
    fuzz->add_option("--scale", fuzz_opts.scale, "(|V+| + |V-|) / d for every instance")->required();
    fuzz->add_option("--seed", fuzz_opts.seed, "Campaign seed")->required();
    fuzz->add_option("--jobs", fuzz_opts.jobs, "Worker threads")->capture_default_str();
    fuzz->add_option("--out", fuzz_opts.out_dir, "Directory for per-instance reports");
    fuzz->add_option("--layout", layout, "separated, interlaced or mixed")
        ->check(CLI::IsMember({"separated", "interlaced", "mixed"}))
        ->capture_default_str();
    fuzz->add_option("--tol", fuzz_opts.verify.tolerance, "Absolute slack on bound comparisons")
        ->capture_default_str();

    app.add_subcommand("kappa", "Print the interior branch point kappa of N");

    double v_plus = 0.0;
    double v_minus = 0.0;
    auto* sharp = app.add_subcommand("sharp", "Run the 2x2 example attaining the favourable bound");
    sharp->add_option("--vplus", v_plus, "Norm of the positive part")->required();
    sharp->add_option("--vminus", v_minus, "Norm of the negative part")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitClean : cli::kExitInputError;
    }

    if (*analyze) return cli::cmd_analyze(problem_path, verify, std::cout, std::cerr);
    if (*table) return cli::cmd_bound_table(x_min, x_max, points, std::cout, std::cerr);
    if (*fuzz) {
        fuzz_opts.layout = layout == "separated"    ? cli::LayoutChoice::Separated
                           : layout == "interlaced" ? cli::LayoutChoice::Interlaced
                                                    : cli::LayoutChoice::Mixed;
        return cli::cmd_fuzz(fuzz_opts, std::cout, std::cerr);
    }
    if (*sharp) return cli::cmd_sharp(v_plus, v_minus, std::cout, std::cerr);
    return cli::cmd_kappa(std::cout);
}
