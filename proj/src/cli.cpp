#include "corrosion/cli.hpp"

#include "corrosion/bem.hpp"
#include "corrosion/config.hpp"
#include "corrosion/diagnostics.hpp"
#include "corrosion/errors.hpp"
#include "corrosion/geometry.hpp"
#include "corrosion/hash.hpp"
#include "corrosion/imaging.hpp"
#include "corrosion/matrix_io.hpp"
#include "corrosion/ntd.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

namespace corrosion::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Resolved {
    ProblemSpec spec;
    RunSettings settings;
};

Resolved resolve_spec(const Options& o)
{
    Resolved r;
    if (!o.config.empty() && o.example != 0)
        throw UsageError("--config and --example are mutually exclusive");
    if (!o.config.empty()) {
        r.spec = load_spec_file(o.config, &r.settings);
    } else if (o.example != 0) {
        r.spec = make_example(o.example, o.nf.value_or(300), o.gamma.value_or(0.5));
    } else {
        throw UsageError("one of --config or --example is required");
    }
    if (o.nf && *o.nf != r.spec.gamma_n.n_panels())
        r.spec = r.spec.with_panels(*o.nf);
    if (o.gamma && !o.config.empty()) {
        if (!(*o.gamma > 0.0))
            throw ConfigError("gamma must be positive");
        r.spec = r.spec.with_gamma(*o.gamma);
    }
    validate(r.spec);
    return r;
}

std::pair<int, int> parse_grid(const std::string& text)
{
    static const std::regex re(R"((\d+)[xX](\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw UsageError("--grid must look like 100x100");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

Point parse_point(const std::string& text)
{
    static const std::regex re(R"(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw UsageError("--z must look like x,y (got '" + text + "')");
    return {std::stod(m[1]), std::stod(m[2])};
}

class Stopwatch {
public:
    void lap(const std::string& stage)
    {
        const auto now = std::chrono::steady_clock::now();
        timings_[stage] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    const json& timings() const { return timings_; }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    json timings_ = json::object();
};

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const ProblemSpec& spec,
                    const json& parameters, const std::vector<std::string>& files, const Stopwatch& clock)
{
    json hashes = json::object();
    for (const auto& f : files)
        hashes[f] = sha256_file(dir / f);
    write_json(dir / "manifest.json", {{"subcommand", subcommand},
                                       {"config", json::parse(spec.description)},
                                       {"spec_hash", spec.hash()},
                                       {"parameters", parameters},
                                       {"files", hashes},
                                       {"timings_seconds", clock.timings()}});
}

Provenance provenance(const ProblemSpec& spec, const FourierBasis* basis, Measure measure)
{
    Provenance p{{"spec_hash", spec.hash()}, {"nf", std::to_string(spec.gamma_n.n_panels())}};
    if (basis) {
        p.emplace_back("nb", std::to_string(basis->nb));
        p.emplace_back("k", format_number(basis->k));
        p.emplace_back("measure", to_string(measure));
    }
    return p;
}

fs::path prepare_out(const Options& o)
{
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

void say(const Options& o, const std::string& text)
{
    if (!o.quiet)
        std::cout << text << '\n';
}

} // namespace

int cmd_forward(const Options& o)
{
    Stopwatch clock;
    const Resolved r = resolve_spec(o);
    const ProblemSpec& spec = r.spec;
    std::vector<Point> sources;
    for (const auto& s : o.z)
        sources.push_back(parse_point(s));
    const fs::path dir = prepare_out(o);
    clock.lap("setup");

    const HealthySolver healthy(spec, o.jobs);
    const CorrodedSolver corroded(spec, o.jobs);
    clock.lap("assemble");

    const BoundaryFunction g = cosine_current(spec, o.current);
    const Eigen::VectorXd current = sample_current(healthy.arc_n(), g);
    const TraceField u0 = healthy.trace(healthy.solve_density(current));
    const TraceField u = corroded.trace(corroded.solve_density(current));
    std::vector<TraceField> greens;
    for (const auto& z : sources)
        greens.push_back(healthy.green_trace(z));
    clock.lap("solve");

    const auto& arc = healthy.arc_n();
    const auto rows = static_cast<Eigen::Index>(arc.size());
    Eigen::MatrixXd table(rows, 6 + static_cast<Eigen::Index>(greens.size()));
    std::vector<std::string> columns{"t", "x", "y", "g", "u0", "u"};
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& n = arc.node(static_cast<std::size_t>(i));
        table.row(i).head(6) << n.t, n.x.x(), n.x.y(), current[i], u0.values[i], u.values[i];
    }
    for (std::size_t k = 0; k < greens.size(); ++k) {
        table.col(6 + static_cast<Eigen::Index>(k)) = greens[k].values;
        columns.push_back("G" + std::to_string(k));
    }
    Provenance prov = provenance(spec, nullptr, r.settings.measure);
    prov.emplace_back("current", "cos(k*" + std::to_string(o.current) + "*(t-t0))");
    for (std::size_t k = 0; k < sources.size(); ++k)
        prov.emplace_back("G" + std::to_string(k),
                          "z=(" + format_number(sources[k].x()) + "," + format_number(sources[k].y()) + ")" +
                              (greens[k].near_boundary ? " near_boundary" : ""));
    write_matrix_csv(dir / "traces.csv", table, columns, prov);
    clock.lap("write");

    write_manifest(dir, "forward", spec, {{"current_index", o.current}, {"z", o.z}, {"jobs", o.jobs}},
                   {"traces.csv"}, clock);
    say(o, "wrote " + (dir / "traces.csv").string() + " (" + std::to_string(rows) + " nodes)");
    return kOk;
}

int cmd_assemble(const Options& o)
{
    Stopwatch clock;
    const Resolved r = resolve_spec(o);
    const ProblemSpec& spec = r.spec;
    const fs::path dir = prepare_out(o);
    const FourierBasis basis = make_basis(spec, o.nb);
    clock.lap("setup");

    const NtdGapMatrix B = assemble_gap_matrix(spec, basis, r.settings.measure, o.jobs);
    clock.lap("assemble");
    const GapSVD svd = gap_svd(B);
    clock.lap("svd");

    std::vector<std::string> cols;
    for (int n = 0; n <= basis.nb; ++n)
        cols.push_back("n" + std::to_string(n));
    const Provenance prov = provenance(spec, &basis, r.settings.measure);
    write_matrix_csv(dir / "B.csv", B.B, cols, prov);

    Eigen::MatrixXd spectrum(svd.sigma.size(), 2);
    for (Eigen::Index j = 0; j < svd.sigma.size(); ++j)
        spectrum.row(j) << static_cast<double>(j), svd.sigma[j];
    write_matrix_csv(dir / "spectrum.csv", spectrum, {"index", "sigma"}, prov);

    write_json(dir / "symmetry.json", {{"symmetry_defect", B.symmetry_defect()},
                                       {"frobenius_norm", B.B.norm()},
                                       {"healthy_norm", B.healthy_norm},
                                       {"nf", B.nf},
                                       {"nb", basis.nb},
                                       {"k", basis.k},
                                       {"measure", to_string(B.measure)},
                                       {"spec_hash", B.spec_hash}});
    clock.lap("write");
    write_manifest(dir, "assemble", spec, {{"nb", o.nb}, {"jobs", o.jobs}},
                   {"B.csv", "spectrum.csv", "symmetry.json"}, clock);
    say(o, "symmetry defect " + format_number(B.symmetry_defect()) + ", wrote " + (dir / "B.csv").string());
    return kOk;
}

int cmd_image(const Options& o)
{
    Stopwatch clock;
    const Method method = parse_method(o.method);
    const auto [nx, ny] = parse_grid(o.grid);
    const Resolved r = resolve_spec(o);
    const ProblemSpec& spec = r.spec;
    const fs::path dir = prepare_out(o);
    const FourierBasis basis = make_basis(spec, o.nb);
    const double level = o.level.value_or(method == Method::FMreg ? spec.fm_level : spec.lsm_level);
    clock.lap("setup");

    auto healthy = std::make_shared<const HealthySolver>(spec, o.jobs);
    const CorrodedSolver corroded(spec, o.jobs);
    const NtdGapMatrix B = assemble_gap_matrix(*healthy, corroded, spec, basis, r.settings.measure);
    clock.lap("assemble");

    const ImagingGrid grid = make_grid(spec, nx, ny);
    const GreenRhsProvider rhs(healthy, basis, r.settings.measure);
    const RhsField b = compute_rhs_field(rhs, grid, o.jobs);
    clock.lap("rhs");

    IndicatorField field = method == Method::FMreg ? fm_indicator(gap_svd(B), b, grid, o.sv_threshold)
                                                   : lsm_indicator(B.B, b, grid, o.alpha);
    field = extract_mask(std::move(field), level);
    field.provenance = spec.hash();
    const ReconstructionScore score = score_reconstruction(field);
    clock.lap("indicator");

    {
        std::ofstream out(dir / "field.csv", std::ios::binary);
        out << "x,y,W_log,mask,label\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << format_number(grid.points[i].x()) << ',' << format_number(grid.points[i].y()) << ','
                << format_number(field.w_log[i]) << ',' << int(field.mask[i]) << ',' << to_string(grid.labels[i])
                << '\n';
    }
    {
        std::ofstream out(dir / "contour.csv", std::ios::binary);
        out << "line,x,y\n";
        for (std::size_t l = 0; l < field.contour.size(); ++l)
            for (const auto& p : field.contour[l])
                out << l << ',' << format_number(p.x()) << ',' << format_number(p.y()) << '\n';
    }
    const json regularization = method == Method::FMreg ? json{{"sv_threshold", o.sv_threshold}}
                                                         : json{{"alpha", o.alpha}};
    write_json(dir / "field.json", {{"method", to_string(method)},
                                    {"regularization", regularization},
                                    {"level", level},
                                    {"grid", {nx, ny}},
                                    {"bounds", grid.bounds},
                                    {"sentinels", field.sentinel_count()},
                                    {"contour_lines", field.contour.size()},
                                    {"spec_hash", spec.hash()},
                                    {"nb", basis.nb},
                                    {"k", basis.k},
                                    {"measure", to_string(r.settings.measure)}});
    write_json(dir / "score.json", {{"jaccard", score.jaccard},
                                    {"baseline_jaccard", score.baseline_jaccard},
                                    {"auc", score.auc ? json(*score.auc) : json(nullptr)},
                                    {"auc_defined", score.auc.has_value()},
                                    {"median_inside", score.median_inside},
                                    {"median_outside", score.median_outside},
                                    {"separation", score.separation},
                                    {"n_inside", score.n_inside},
                                    {"n_outside", score.n_outside},
                                    {"n_sentinel", score.n_sentinel},
                                    {"n_excluded", score.n_excluded}});
    {
        std::ofstream out(dir / "plot.gp", std::ios::binary);
        const auto& bd = grid.bounds;
        out << "# gnuplot script: gnuplot plot.gp -> field.png\n"
            << "set datafile separator ','\n"
            << "set datafile missing 'nan'\n"
            << "set terminal pngcairo size 800,720\n"
            << "set output 'field.png'\n"
            << "set size ratio -1\n"
            << "set xrange [" << format_number(bd[0]) << ":" << format_number(bd[1]) << "]\n"
            << "set yrange [" << format_number(bd[2]) << ":" << format_number(bd[3]) << "]\n"
            << "set title '" << to_string(method) << " W^{log}, level " << format_number(level) << "'\n"
            << "set palette rgbformulae 33,13,10\n"
            << "unset key\n"
            << "plot 'field.csv' every ::1 using 1:2:3 with image";
        for (std::size_t l = 0; l < field.contour.size(); ++l)
            out << ", \\\n     'contour.csv' every ::1 using 2:($1==" << l
                << " ? $3 : NaN) with lines dashtype 2 linewidth 2 linecolor rgb 'blue'";
        out << '\n';
    }
    clock.lap("write");
    write_manifest(dir, "image", spec,
                   {{"method", to_string(method)},
                    {"sv_threshold", o.sv_threshold},
                    {"alpha", o.alpha},
                    {"level", level},
                    {"grid", o.grid},
                    {"nb", o.nb},
                    {"jobs", o.jobs}},
                   {"field.csv", "field.json", "contour.csv", "score.json", "plot.gp"}, clock);
    say(o, std::string(to_string(method)) + ": AUC " + (score.auc ? format_number(*score.auc) : "undefined") +
               ", Jaccard " + format_number(score.jaccard) + ", wrote " + (dir / "field.csv").string());
    return kOk;
}

int cmd_verify(const Options& o)
{
    Stopwatch clock;
    const Resolved r = resolve_spec(o);
    const fs::path dir = prepare_out(o);
    VerifyOptions vo;
    vo.nb = o.nb;
    vo.measure = r.settings.measure;
    vo.jobs = o.jobs;
    clock.lap("setup");
    const auto reports = run_diagnostics(r.spec, vo);
    clock.lap("diagnostics");

    bool pass = true;
    json checks = json::array();
    for (const auto& rep : reports) {
        pass = pass && rep.pass;
        checks.push_back(rep.to_json());
        say(o, (rep.pass ? "PASS " : "FAIL ") + rep.name + " measured=" + format_number(rep.measured) +
                   " tolerance=" + format_number(rep.tolerance));
    }
    write_json(dir / "report.json", {{"pass", pass}, {"spec_hash", r.spec.hash()}, {"checks", checks}});
    clock.lap("write");
    write_manifest(dir, "verify", r.spec, {{"nb", o.nb}, {"jobs", o.jobs}}, {"report.json"}, clock);
    return pass ? kOk : kDiagnostics;
}

int run(int argc, char** argv)
{
    CLI::App app{"Corroded-boundary imaging from partial Neumann-to-Dirichlet data"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON problem description")->check(CLI::ExistingFile);
        sub->add_option("--example", o.example, "reference geometry 1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));
        sub->add_option("--gamma", o.gamma, "constant corrosion coefficient");
        sub->add_option("--nf", o.nf, "panels per boundary arc")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", o.quiet, "no summary on stdout");
    };
    auto basis = [&o](CLI::App* sub) {
        sub->add_option("--nb", o.nb, "highest basis index N_B")->check(CLI::NonNegativeNumber);
    };

    CLI::App* forward = app.add_subcommand("forward", "Gamma_N traces of u0, u and optionally G(., z)");
    common(forward);
    forward->add_option("--current", o.current, "basis index n of the current cos(k n t)");
    forward->add_option("--z", o.z, "Green's function source point x,y (repeatable)");

    CLI::App* assemble = app.add_subcommand("assemble", "Galerkin matrix B, its spectrum and symmetry defect");
    common(assemble);
    basis(assemble);

    CLI::App* image = app.add_subcommand("image", "FMreg / LSMreg indicator field, mask and score");
    common(image);
    basis(image);
    image->add_option("--method", o.method, "fmreg or lsmreg")->check(CLI::IsMember({"fmreg", "lsmreg"}));
    image->add_option("--sv-threshold", o.sv_threshold, "FMreg singular value cutoff")
        ->check(CLI::PositiveNumber);
    image->add_option("--alpha", o.alpha, "LSMreg Tikhonov parameter")->check(CLI::PositiveNumber);
    image->add_option("--level", o.level, "level of the reconstruction mask");
    image->add_option("--grid", o.grid, "sampling grid NxN");

    CLI::App* verify = app.add_subcommand("verify", "run all numerical diagnostics");
    common(verify);
    basis(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (forward->parsed())
            return cmd_forward(o);
        if (assemble->parsed())
            return cmd_assemble(o);
        if (image->parsed())
            return cmd_image(o);
        return cmd_verify(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace corrosion::cli
