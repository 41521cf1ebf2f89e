#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include <pwcalc/pwcalc.hpp>

#include "matrix_io.hpp"
#include "report_json.hpp"

namespace pwcalc::cli {

Environment environment_from_process() {
    Environment env;
    if (const char* v = std::getenv("PWCALC_TOL_ZERO")) env.tol_zero = v;
    return env;
}

namespace {

const std::vector<std::string> kCommands = {"rep",     "eval", "lebesgue", "psum", "psum-limit",   "singular", "abscont",
                                            "rn",      "kubo", "pair",     "trace", "tensor-check", "form-p"};

const std::map<std::string, std::string> kAbout = {
    {"rep", "representation data: support eigenvalues, spectrum of R, R and S"},
    {"eval", "phi(A,B) for a named function (--phi)"},
    {"lebesgue", "B = Bc + Bs with respect to A, and the projection P"},
    {"psum", "parallel sum A:B"},
    {"psum-limit", "iterates (2^k A):B up to max-doublings"},
    {"singular", "whether A and B are mutually singular"},
    {"abscont", "whether B is absolutely continuous with respect to A"},
    {"rn", "derivative H, factor Z and Z*Z for A positive definite"},
    {"kubo", "A^1/2 h(XX*) A^1/2 form of phi(A,B), A positive definite"},
    {"pair", "phi(A,B) paired with --rho, may be +inf"},
    {"trace", "Tr phi(A,B), may be +inf"},
    {"tensor-check", "product rule for power/entropy on (a,b,rho) x (a2,b2,rho2)"},
    {"form-p", "quadratic form p(xi) of the Radon-Nikodym derivative"},
};

struct Options {
    std::map<std::string, std::string> files;  // a, b, a2, b2, rho, rho2, xi
    std::optional<std::string> phi;
    std::optional<double> alpha;
    std::optional<double> tol_zero;
    std::optional<double> tol_one;
    std::optional<int> max_doublings;
    std::optional<std::string> out;
};

// Input slots in report order.
const std::vector<std::string> kSlots = {"a", "b", "a2", "b2", "rho", "rho2", "xi"};

std::vector<std::string> slots_for(const std::string& cmd) {
    if (cmd == "pair") return {"a", "b", "rho"};
    if (cmd == "tensor-check") return {"a", "b", "a2", "b2", "rho", "rho2"};
    if (cmd == "form-p") return {"a", "b", "xi"};
    return {"a", "b"};
}

bool takes_phi(const std::string& cmd) {
    return cmd == "eval" || cmd == "kubo" || cmd == "pair" || cmd == "trace" || cmd == "tensor-check";
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::input, what + ": '" + text + "' is not a number");
    }
}

PwFunction make_function(const std::string& spec, std::optional<double> alpha) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::optional<double> param;
    if (colon != std::string::npos) param = parse_real(spec.substr(colon + 1), "--phi parameter");
    if (param && alpha && *param != *alpha)
        fail(ErrorKind::input, "--phi " + spec + " conflicts with --alpha " + format_real(*alpha));
    if (!param) param = alpha;
    auto need = [&](const char* what) {
        if (!param) fail(ErrorKind::input, "--phi " + name + " needs a parameter (" + what + ")");
        return *param;
    };
    if (name == "abs-part") return functions::abs_part();
    if (name == "parallel") return functions::parallel();
    if (name == "arith") return functions::arith();
    if (name == "left") return functions::left();
    if (name == "right") return functions::right();
    if (name == "entropy") return functions::entropy();
    if (name == "h") return functions::h();
    if (name == "geom") return functions::geom(need("alpha in (0,1)"));
    if (name == "power") return functions::power(need("alpha > 1"));
    if (name == "phi-n") return functions::phi_n(need("n > 0"));
    if (name == "h-n") return functions::h_n(need("n >= 1"));
    fail(ErrorKind::input, "unknown --phi '" + name +
                               "' (expected abs-part, parallel, arith, left, right, geom:A, power:A, entropy, phi-n:N, "
                               "h, h-n:N)");
}

Json extended(ExtendedReal v) {
    if (v.is_infinite()) return "+inf";
    return v.value();
}

Json finite_or_inf(double v) {
    if (v == kInf) return "+inf";
    return v;
}

Json config_json(const ToleranceConfig& t) {
    Json c;
    c["herm_tol"] = t.herm_tol;
    c["psd_tol_rel"] = t.psd_tol_rel;
    c["psd_tol"] = t.psd_tol ? Json(*t.psd_tol) : Json(nullptr);
    c["support_tol"] = t.support_tol ? Json(*t.support_tol) : Json(nullptr);
    c["zero_tol"] = t.zero_tol;
    c["one_tol"] = t.one_tol;
    c["weight_tol"] = t.weight_tol;
    c["conv_tol"] = t.conv_tol;
    c["max_doublings"] = t.max_doublings;
    c["domination_tol"] = t.domination_tol;
    c["max_dim"] = t.max_dim;
    return c;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::input:
    case ErrorKind::precondition:
    case ErrorKind::domination: return exit_input;
    case ErrorKind::numeric:
    case ErrorKind::not_psd: return exit_numeric;
    case ErrorKind::extended_value: return exit_extended;
    }
    return exit_internal;
}

std::string margin_warning(const char* what, double margin, const ToleranceConfig& tol) {
    return std::string("low spectral margin in ") + what + ": nearest retained eigenvalue is " +
           format_real(margin) + " past its threshold (zero_tol = " + format_real(tol.zero_tol) +
           ", one_tol = " + format_real(tol.one_tol) + ")";
}

class Command {
public:
    Command(std::string name, Options opts, const Environment& env) : name_(std::move(name)), opts_(std::move(opts)) {
        report_["operation"] = name_;
        report_["inputs"] = Json::object();
        report_["config"] = config_json(tol_);
        report_["outputs"] = Json::object();
        report_["diagnostics"] = Json::object();
        report_["diagnostics"]["warnings"] = Json::array();
        report_["status"] = "ok";
        env_ = env;
    }

    Json& report() { return report_; }

    void execute() {
        configure();
        const auto slots = slots_for(name_);
        for (const auto& [slot, path] : opts_.files)
            if (std::find(slots.begin(), slots.end(), slot) == slots.end())
                fail(ErrorKind::input, "--" + slot + " is not used by '" + name_ + "'");
        if (opts_.phi && !takes_phi(name_)) fail(ErrorKind::input, "--phi is not used by '" + name_ + "'");
        if (opts_.alpha && !takes_phi(name_)) fail(ErrorKind::input, "--alpha is not used by '" + name_ + "'");
        for (const auto& slot : kSlots) {
            if (std::find(slots.begin(), slots.end(), slot) == slots.end()) continue;
            auto it = opts_.files.find(slot);
            if (it == opts_.files.end()) fail(ErrorKind::input, "'" + name_ + "' requires --" + slot + " FILE");
            auto f = load_json_file(it->second);
            Json entry;
            entry["path"] = f.path;
            entry["sha256"] = f.sha256;
            report_["inputs"][slot] = entry;
            loaded_[slot] = std::move(f);
        }
        dispatch();
        if (!report_["diagnostics"]["warnings"].empty()) report_["status"] = "warning";
    }

private:
    void configure() {
        if (env_.tol_zero) tol_.zero_tol = parse_real(*env_.tol_zero, "PWCALC_TOL_ZERO");
        if (opts_.tol_zero) tol_.zero_tol = *opts_.tol_zero;
        if (opts_.tol_one) tol_.one_tol = *opts_.tol_one;
        if (opts_.max_doublings) tol_.max_doublings = *opts_.max_doublings;
        tol_.validate();
        report_["config"] = config_json(tol_);
    }

    PsdMatrix psd(const std::string& slot) {
        const Matrix m = matrix_from_json(loaded_.at(slot).content, "--" + slot);
        try {
            return PsdMatrix(m, tol_);
        } catch (const Error& e) {
            throw Error(e.kind(), "--" + slot + ": " + e.what());
        }
    }

    PwFunction phi() {
        if (!opts_.phi) fail(ErrorKind::input, "'" + name_ + "' requires --phi NAME[:PARAM]");
        return make_function(*opts_.phi, opts_.alpha);
    }

    Json& out() { return report_["outputs"]; }
    Json& diag() { return report_["diagnostics"]; }
    void warn(const std::string& w) { diag()["warnings"].push_back(w); }

    void dispatch() {
        static const std::map<std::string, void (Command::*)()> table = {
            {"rep", &Command::cmd_rep},
            {"eval", &Command::cmd_eval},
            {"lebesgue", &Command::cmd_lebesgue},
            {"psum", &Command::cmd_psum},
            {"psum-limit", &Command::cmd_psum_limit},
            {"singular", &Command::cmd_singular},
            {"abscont", &Command::cmd_abscont},
            {"rn", &Command::cmd_rn},
            {"kubo", &Command::cmd_kubo},
            {"pair", &Command::cmd_pair},
            {"trace", &Command::cmd_trace},
            {"tensor-check", &Command::cmd_tensor},
            {"form-p", &Command::cmd_form_p},
        };
        (this->*table.at(name_))();
    }

    PwRepresentation rep_ab() { return build_rep(psd("a"), psd("b"), tol_); }

    void cmd_rep() {
        const auto rep = rep_ab();
        out()["rank"] = rep.rank;
        out()["support_eigenvalues"] = vector_to_json(rep.support_eigenvalues);
        out()["left_spectrum"] = vector_to_json(rep.left_spectrum.eigenvalues);
        out()["R"] = matrix_to_json(rep.left_density);
        out()["S"] = matrix_to_json(rep.right_density);
        const auto prof = spectral_profile(rep, functions::arith());
        diag()["num_zero"] = prof.num_zero;
        diag()["num_one"] = prof.num_one;
        diag()["spectral_margin"] = finite_or_inf(prof.spectral_margin);
        diag()["xt_residual"] = detail::relative_residual(rep.left_contraction * rep.transfer, rep.sqrt_a);
        diag()["yt_residual"] = detail::relative_residual(rep.right_contraction * rep.transfer, rep.sqrt_b);
        if (prof.spectral_margin < 9.0 * std::min(tol_.zero_tol, tol_.one_tol))
            warn(margin_warning("R", prof.spectral_margin, tol_));
    }

    void cmd_eval() {
        const auto f = phi();
        const auto rep = rep_ab();
        out()["function"] = f.id();
        try {
            const auto ev = pw_eval_detailed(rep, f);
            out()["value"] = matrix_to_json(ev.value);
            diag()["num_zero"] = ev.profile.num_zero;
            diag()["num_one"] = ev.profile.num_one;
            diag()["spectral_margin"] = finite_or_inf(ev.profile.spectral_margin);
            if (ev.profile.spectral_margin < 9.0 * std::min(tol_.zero_tol, tol_.one_tol))
                warn(margin_warning("R", ev.profile.spectral_margin, tol_));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::extended_value) throw;
            throw Error(e.kind(), std::string("extended value; use pair/trace (") + e.what() + ")");
        }
    }

    void cmd_lebesgue() {
        const auto d = lebesgue_decompose(rep_ab());
        out()["Bc"] = matrix_to_json(d.absolutely_continuous);
        out()["Bs"] = matrix_to_json(d.singular);
        out()["P"] = matrix_to_json(d.projection);
        diag()["rank"] = d.diagnostics.rank;
        diag()["num_zero_eigs"] = d.diagnostics.num_zero_eigs;
        diag()["spectral_margin"] = finite_or_inf(d.diagnostics.spectral_margin);
        diag()["residual_sum"] = d.diagnostics.residual_sum;
        for (const auto& w : d.diagnostics.warnings) warn(w);
    }

    void cmd_psum() { out()["value"] = matrix_to_json(parallel_sum(rep_ab())); }

    void cmd_psum_limit() {
        const auto lim = parallel_sum_limit(rep_ab());
        out()["limit"] = matrix_to_json(lim.limit);
        out()["converged"] = lim.converged;
        out()["monotone"] = lim.monotone;
        diag()["iterations"] = lim.iterates.size();
        diag()["gaps"] = vector_to_json(lim.gaps);
        if (!lim.converged)
            warn("not converged: final gap " + format_real(lim.gaps.empty() ? 0.0 : lim.gaps.back()) +
                 " >= conv_tol " + format_real(tol_.conv_tol) + " after max_doublings = " +
                 std::to_string(tol_.max_doublings));
        if (!lim.monotone) warn("iterates not monotone in Loewner order (slack 1e-9 * max(1, ||B||))");
    }

    void cmd_singular() {
        const auto s = is_mutually_singular(rep_ab());
        out()["singular"] = s.singular;
        out()["witness"] = s.witness ? Json(*s.witness) : Json(nullptr);
        out()["max_distance"] = s.max_distance;
    }

    void cmd_abscont() {
        const auto r = is_abs_continuous(rep_ab());
        out()["abs_continuous"] = r.abs_continuous;
        out()["projection_deviation"] = r.projection_deviation;
        diag()["threshold"] = kAbsContinuityTol;
    }

    void put_rn(const RnResult& r) {
        out()["H"] = matrix_to_json(r.derivative);
        out()["Z"] = matrix_to_json(r.factor);
        out()["reconstruction"] = matrix_to_json(r.reconstruction);
        diag()["residual"] = r.residual;
        diag()["condition"] = r.condition;
        diag()["infinite_directions"] = r.infinite_directions;
        diag()["near_singular"] = r.near_singular;
        if (r.near_singular > 0)
            warn(std::to_string(r.near_singular) + " XX*-eigenvalue(s) retained below 10*zero_tol (zero_tol = " +
                 format_real(tol_.zero_tol) + ", condition = " + format_real(r.condition) + ")");
    }

    void cmd_rn() { put_rn(rn_factor(psd("a"), psd("b"), tol_)); }

    void cmd_kubo() {
        const auto f = phi();
        out()["function"] = f.id();
        put_rn(kubo_ando_form(psd("a"), psd("b"), f, tol_));
    }

    void put_pairing(const PairingResult& p) {
        out()["value"] = extended(p.value);
        out()["finite_part"] = p.finite_part;
        out()["infinite_weight"] = p.infinite_weight;
    }

    void cmd_pair() {
        const auto f = phi();
        out()["function"] = f.id();
        const auto rho = psd("rho");
        put_pairing(pw_pairing_detailed(rep_ab(), f, rho));
    }

    void cmd_trace() {
        const auto f = phi();
        out()["function"] = f.id();
        const auto rep = rep_ab();
        put_pairing(pw_pairing_detailed(rep, f, PsdMatrix::trusted(Matrix::identity(rep.dim))));
    }

    void cmd_tensor() {
        const auto f = phi();
        TensorFunctional fn;
        if (f.id() == "entropy") {
            fn = TensorFunctional::entropy();
        } else if (f.id().rfind("power:", 0) == 0) {
            fn = TensorFunctional::power(make_alpha());
        } else {
            fail(ErrorKind::input, "tensor-check supports --phi entropy or power:ALPHA only");
        }
        out()["function"] = f.id();
        const auto r = tensor_pairing_check(psd("a"), psd("b"), psd("a2"), psd("b2"), psd("rho"), psd("rho2"), fn, tol_);
        out()["lhs"] = extended(r.lhs);
        out()["rhs"] = extended(r.rhs);
        out()["infinity_consistent"] = r.infinity_consistent;
        diag()["residual"] = r.residual;
        diag()["relative_residual"] = r.relative_residual;
        if (!r.infinity_consistent) warn("+inf on one side only (weight_tol = " + format_real(tol_.weight_tol) + ")");
    }

    double make_alpha() const {
        const auto& s = *opts_.phi;
        const auto colon = s.find(':');
        return colon == std::string::npos ? *opts_.alpha : parse_real(s.substr(colon + 1), "--phi parameter");
    }

    void cmd_form_p() {
        const auto xi = vector_from_json(loaded_.at("xi").content, "--xi");
        out()["value"] = extended(form_p(psd("a"), psd("b"), xi, tol_));
    }

    std::string name_;
    Options opts_;
    Environment env_;
    ToleranceConfig tol_;
    std::map<std::string, LoadedFile> loaded_;
    Json report_;
};

void add_common(CLI::App* sub, Options& o) {
    for (const auto& slot : kSlots) {
        const std::string desc = slot == "xi" ? "vector file (n, re, im)" : "matrix file (n, re, im)";
        sub->add_option_function<std::string>("--" + slot, [&o, slot](const std::string& v) { o.files[slot] = v; },
                                              desc);
    }
    sub->add_option_function<std::string>("--phi", [&o](const std::string& v) { o.phi = v; }, "function NAME[:PARAM]");
    sub->add_option_function<double>("--alpha", [&o](double v) { o.alpha = v; }, "parameter for geom/power");
    sub->add_option_function<double>("--tol-zero", [&o](double v) { o.tol_zero = v; }, "zero_tol");
    sub->add_option_function<double>("--tol-one", [&o](double v) { o.tol_one = v; }, "one_tol");
    sub->add_option_function<int>("--max-doublings", [&o](int v) { o.max_doublings = v; }, "psum-limit cap");
    sub->add_option_function<std::string>("--out", [&o](const std::string& v) { o.out = v; }, "write the report here");
}

void error_into(Json& report, const char* kind, const std::string& message) {
    report["diagnostics"]["error"] = Json{{"kind", kind}, {"message", message}};
    report["status"] = "error";
}

Json bare_report(const std::string& op) {
    Json r;
    r["operation"] = op.empty() ? Json(nullptr) : Json(op);
    r["inputs"] = Json::object();
    r["config"] = config_json(ToleranceConfig{});
    r["outputs"] = Json::object();
    r["diagnostics"] = Json{{"warnings", Json::array()}};
    r["status"] = "ok";
    return r;
}

int emit(const Json& report, const Options& o, std::ostream& out) {
    const std::string text = dump(report);
    if (o.out) {
        std::ofstream f(*o.out, std::ios::binary);
        if (f << text) return 0;
        Json copy = report;
        error_into(copy, "input", "cannot write --out '" + *o.out + "'");
        out << dump(copy);
        return exit_input;
    }
    out << text;
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, const Environment& env) {
    CLI::App app{"PSD pair functional calculus and Lebesgue decomposition", "pwcalc"};
    app.require_subcommand(1);
    Options opts;
    std::string chosen;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name, kAbout.at(name));
        add_common(sub, opts);
        sub->callback([&chosen, name] { chosen = name; });
    }

    if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
        std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
        std::string known;
        for (const auto& c : kCommands) known += (known.empty() ? "" : ", ") + c;
        Json r = bare_report("");
        error_into(r, "input", "unknown subcommand '" + args[0] + "' (expected one of " + known + ")");
        out << dump(r);
        return exit_input;
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        const std::string op =
            !args.empty() && std::find(kCommands.begin(), kCommands.end(), args[0]) != kCommands.end() ? args[0] : "";
        Json r = bare_report(op);
        error_into(r, "input", e.what());
        out << dump(r);
        return exit_input;
    }

    Command cmd(chosen, opts, env);
    int code = exit_ok;
    try {
        cmd.execute();
    } catch (const Error& e) {
        error_into(cmd.report(), to_string(e.kind()), e.what());
        code = exit_code_for(e.kind());
    } catch (const std::exception& e) {
        error_into(cmd.report(), "internal", e.what());
        code = exit_internal;
    }
    const int io = emit(cmd.report(), opts, out);
    return io ? io : code;
}

} // namespace pwcalc::cli
