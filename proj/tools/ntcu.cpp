// ntcu: command-line front end for the example families, metric queries and determinants.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "ntcu/queries.hpp"

using namespace ntcu;
namespace io = ntcu::io;

namespace {

struct Output {
    std::string csv, json;
};

int emit(const ScenarioReport& R, const Output& o) {
    io::print_table(std::cout, R);
    if (!o.csv.empty()) io::write_csv(o.csv, R);
    if (!o.json.empty()) io::write_json(o.json, R);
    return R.all_pass() ? 0 : 1;
}

std::vector<long> parse_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stol(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nielsen-Thomsen and Cuntz-semigroup distances for one-dimensional NCCW models"};
    app.require_subcommand(1);
    Output out;
    auto add_out = [&](CLI::App* c) {
        c->add_option("--csv", out.csv, "write the quantities as CSV");
        c->add_option("--json", out.json, "write the full report as JSON");
    };

    auto* ex = app.add_subcommand("examples", "built-in example families");
    ex->require_subcommand(1);
    long rk = 1, rl = 0;
    int rstage = 4;
    auto* rob = ex->add_subcommand("robert", "the Robert family phi_{u_k}, phi_{u_l}");
    rob->add_option("--k", rk)->required();
    rob->add_option("--l", rl)->required();
    rob->add_option("--stage", rstage, "stage n (default 4)");
    add_out(rob);
    int nmax = 4;
    std::string kseq = "2,3,4";
    auto* gjl = ex->add_subcommand("gjl", "the phi/psi system over A_n");
    gjl->add_option("--nmax", nmax, "number of stages (default 4)");
    gjl->add_option("--kseq", kseq, "k_1,k_2,... (default 2,3,4)");
    add_out(gjl);
    int nstage = 0;
    auto* nov = ex->add_subcommand("novel", "the pair u, -u over the 2^n towers");
    nov->add_option("--stage", nstage, "single stage n; default sweeps 2..10");
    add_out(nov);

    auto* met = app.add_subcommand("metric", "distances between two eigenvalue patterns");
    met->require_subcommand(1);
    std::string fa, fb, fca, fcb, kk = "k1", fm = "triv";
    auto* mdcu = met->add_subcommand("dcu", "Cuntz-semigroup distance");
    mdcu->add_option("A", fa)->required()->check(CLI::ExistingFile);
    mdcu->add_option("B", fb)->required()->check(CLI::ExistingFile);
    add_out(mdcu);
    auto* mfd = met->add_subcommand("frakd", "Nielsen-Thomsen distance");
    mfd->add_option("A", fa)->required()->check(CLI::ExistingFile);
    mfd->add_option("B", fb)->required()->check(CLI::ExistingFile);
    mfd->add_option("--basis-a", fca)->required()->check(CLI::ExistingFile);
    mfd->add_option("--basis-b", fcb)->required()->check(CLI::ExistingFile);
    add_out(mfd);
    auto* mds = met->add_subcommand("dstar", "refined distance through Cu_K");
    mds->add_option("A", fa)->required()->check(CLI::ExistingFile);
    mds->add_option("B", fb)->required()->check(CLI::ExistingFile);
    mds->add_option("--k", kk)->check(CLI::IsMember({"k1", "kbar1"}));
    mds->add_option("--fiber-metric", fm)->check(CLI::IsMember({"triv", "frakd"}));
    add_out(mds);

    std::string fu;
    bool numeric = false;
    long steps = 100000;
    auto* det = app.add_subcommand("det", "de la Harpe-Skandalis determinant of a unitary field");
    det->add_option("U", fu)->required()->check(CLI::ExistingFile);
    det->add_flag("--numeric", numeric, "cross-check against the numeric path integral");
    det->add_option("--steps", steps, "quadrature steps (>= 1000)");
    add_out(det);

    CLI11_PARSE(app, argc, argv);
    try {
        if (rob->parsed()) return emit(robert_report(rk, rl, rstage), out);
        if (gjl->parsed()) return emit(gjl_report(nmax, parse_list(kseq)), out);
        if (nov->parsed()) return emit(nstage ? novel_report(nstage) : novel_sweep((int)std::min(10L, desk_limit(12))), out);
        if (mdcu->parsed()) return emit(io::query_dcu(fa, fb), out);
        if (mfd->parsed()) return emit(io::query_frakd(fa, fb, fca, fcb), out);
        if (mds->parsed()) return emit(io::query_dstar(fa, fb, kk, fm), out);
        if (det->parsed()) return emit(io::query_det(fu, numeric, steps), out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
