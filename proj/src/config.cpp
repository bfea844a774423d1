#include "qheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "qheat/errors.hpp"
#include "qheat/units.hpp"

namespace qheat {

namespace {

struct Entry {
    std::string value;
    int line{0};
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"qubit", {"omega0_GHz", "g_GHz"}},
        {"drive", {"kind", "a", "f_GHz", "dt1_ns", "dt2_ns"}},
        {"sweep", {"variable", "start", "stop", "points", "refine_peaks", "refine_orders", "refine_window",
                   "refine_factor"}},
        {"bath", {"kappa", "T_mK", "filter_Q", "filter_f_GHz", "active_branch", "pure_dephasing"}},
        {"integrator", {"steps_per_cycle", "tol", "max_cycles"}},
        {"output", {"csv", "trajectory", "sample_stride"}},
        {"study", {"variable", "values", "orders", "half_width", "grid_points"}},
    };
    return s;
}

std::string schema_key(const std::string& section) {
    return section.starts_with("bath.") ? "bath" : section;
}

// Symbols usable in numeric values. omega1/omega2 are extremal gaps in
// rad/ns, f1/f2 the same in GHz.
struct Symbols {
    std::optional<double> omega1, omega2;
};

class Reader {
public:
    Reader(const std::map<std::string, Section>& sections, std::vector<std::string>& violations)
        : sections_(sections), violations_(violations) {}

    Symbols symbols;

    bool has(const std::string& sec, const std::string& key) const {
        auto it = sections_.find(sec);
        return it != sections_.end() && it->second.contains(key);
    }

    const Entry* find(const std::string& sec, const std::string& key) const {
        auto it = sections_.find(sec);
        if (it == sections_.end()) return nullptr;
        auto jt = it->second.find(key);
        return jt == it->second.end() ? nullptr : &jt->second;
    }

    std::optional<double> number(const std::string& sec, const std::string& key, bool required) const {
        const Entry* e = find(sec, key);
        if (!e) {
            if (required) violations_.push_back("[" + sec + "] " + key + " is required");
            return std::nullopt;
        }
        return evaluate(*e, key);
    }

    std::optional<int> integer(const std::string& sec, const std::string& key, bool required) const {
        const Entry* e = find(sec, key);
        if (!e) {
            if (required) violations_.push_back("[" + sec + "] " + key + " is required");
            return std::nullopt;
        }
        int v = 0;
        const auto& s = e->value;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(e->line, key, "expected an integer");
        return v;
    }

    std::optional<bool> boolean(const std::string& sec, const std::string& key) const {
        const Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
        if (e->value == "false" || e->value == "no" || e->value == "0") return false;
        throw ParseError(e->line, key, "expected true or false");
    }

    std::optional<std::string> text(const std::string& sec, const std::string& key, bool required) const {
        const Entry* e = find(sec, key);
        if (!e) {
            if (required) violations_.push_back("[" + sec + "] " + key + " is required");
            return std::nullopt;
        }
        return e->value;
    }

    template <class T>
    T choice(const std::string& sec, const std::string& key, const std::map<std::string, T>& options,
             T fallback, bool required) const {
        const Entry* e = find(sec, key);
        if (!e) {
            if (required) violations_.push_back("[" + sec + "] " + key + " is required");
            return fallback;
        }
        auto it = options.find(e->value);
        if (it == options.end()) {
            std::string allowed;
            for (const auto& [k, _] : options) allowed += (allowed.empty() ? "" : "|") + k;
            throw ParseError(e->line, key, "expected one of " + allowed);
        }
        return it->second;
    }

    std::vector<double> number_list(const std::string& sec, const std::string& key) const {
        std::vector<double> out;
        const Entry* e = find(sec, key);
        if (!e) return out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(evaluate(Entry{trim(item), e->line}, key));
        return out;
    }

private:
    // term (('*' | '/') term)*, term = number | pi | omega1 | omega2 | f1 | f2
    double evaluate(const Entry& e, const std::string& key) const {
        const std::string& s = e.value;
        if (s.empty()) throw ParseError(e.line, key, "empty value");
        double acc = 1.0;
        char op = '*';
        std::size_t i = 0;
        while (true) {
            while (i < s.size() && s[i] == ' ') ++i;
            std::size_t j = i;
            while (j < s.size() && s[j] != '*' && s[j] != '/') ++j;
            const std::string tok = trim(std::string_view(s).substr(i, j - i));
            const double v = term(tok, e, key);
            acc = op == '*' ? acc * v : acc / v;
            if (j >= s.size()) break;
            op = s[j];
            i = j + 1;
        }
        return acc;
    }

    double term(const std::string& tok, const Entry& e, const std::string& key) const {
        if (tok == "pi") return std::numbers::pi;
        auto gap = [&](const std::optional<double>& w) {
            if (!w) throw ParseError(e.line, key, "'" + tok + "' needs a valid [qubit] section");
            return *w;
        };
        if (tok == "omega1") return gap(symbols.omega1);
        if (tok == "omega2") return gap(symbols.omega2);
        if (tok == "f1") return units::angular_to_ghz(gap(symbols.omega1));
        if (tok == "f2") return units::angular_to_ghz(gap(symbols.omega2));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError(e.line, key, "cannot read '" + tok + "' as a number");
        return v;
    }

    const std::map<std::string, Section>& sections_;
    std::vector<std::string>& violations_;
};

std::map<std::string, Section> tokenize(std::string_view text) {
    std::map<std::string, Section> sections;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto c = raw.find_first_of("#;"); c != std::string_view::npos) raw = raw.substr(0, c);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
            current = trim(std::string_view(line).substr(1, line.size() - 2));
            const auto key = schema_key(current);
            if (!schema().contains(key)) throw ParseError(line_no, current, "unknown section");
            if (key == "bath") {
                const auto idx = current.substr(5);
                if (idx != "1" && idx != "2") throw ParseError(line_no, current, "bath index must be 1 or 2");
            }
            if (sections.contains(current)) throw ParseError(line_no, current, "duplicate section");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, line, "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (current.empty()) throw ParseError(line_no, key, "key outside any section");
        if (!schema().at(schema_key(current)).contains(key))
            throw ParseError(line_no, key, "unknown key in [" + current + "]");
        auto& sec = sections[current];
        if (sec.contains(key)) throw ParseError(line_no, key, "duplicate key");
        sec[key] = Entry{value, line_no};
    }
    return sections;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    const auto sections = tokenize(text);
    std::vector<std::string> bad;
    Reader in(sections, bad);
    ExperimentConfig cfg;
    cfg.source = std::string(text);

    for (const char* required : {"qubit", "drive", "sweep", "bath.1"})
        if (!sections.contains(required)) bad.push_back(std::string("missing section [") + required + "]");
    if (sections.contains("bath.2") && !sections.contains("bath.1")) bad.push_back("[bath.2] needs [bath.1]");

    // qubit
    cfg.qubit.omega0_GHz = in.number("qubit", "omega0_GHz", true).value_or(0.0);
    cfg.qubit.g_GHz = in.number("qubit", "g_GHz", true).value_or(0.0);
    if (!(cfg.qubit.omega0_GHz > 0.0)) bad.push_back("[qubit] omega0_GHz must be > 0");
    if (!(cfg.qubit.g_GHz > 0.0)) bad.push_back("[qubit] g_GHz must be > 0");
    if (cfg.qubit.omega0_GHz > 0.0 && cfg.qubit.g_GHz > 0.0) {
        const double w0 = units::ghz_to_angular(cfg.qubit.omega0_GHz);
        const double g = units::ghz_to_angular(cfg.qubit.g_GHz);
        in.symbols.omega1 = std::hypot(2.0 * g, w0);
        in.symbols.omega2 = w0;
    }

    // drive
    cfg.drive.kind = in.choice<DriveKind>(
        "drive", "kind", {{"tanh", DriveKind::Tanh}, {"asymmetric_square", DriveKind::AsymmetricSquare}},
        DriveKind::Tanh, true);
    cfg.drive.f_GHz = in.number("drive", "f_GHz", false);
    cfg.drive.dt1_ns = in.number("drive", "dt1_ns", false);
    if (cfg.drive.kind == DriveKind::Tanh) {
        cfg.drive.a = in.number("drive", "a", true).value_or(0.0);
        if (!(cfg.drive.a > 0.0)) bad.push_back("[drive] a must be > 0");
        if (in.has("drive", "dt1_ns") || in.has("drive", "dt2_ns"))
            bad.push_back("[drive] dt1_ns/dt2_ns apply to kind = asymmetric_square only");
        if (cfg.drive.f_GHz && !(*cfg.drive.f_GHz > 0.0)) bad.push_back("[drive] f_GHz must be > 0");
    } else {
        cfg.drive.dt2_ns = in.number("drive", "dt2_ns", true).value_or(0.0);
        if (!(cfg.drive.dt2_ns > 0.0)) bad.push_back("[drive] dt2_ns must be > 0");
        if (in.has("drive", "a") || in.has("drive", "f_GHz"))
            bad.push_back("[drive] a/f_GHz apply to kind = tanh only");
        if (cfg.drive.dt1_ns && !(*cfg.drive.dt1_ns > 0.0)) bad.push_back("[drive] dt1_ns must be > 0");
    }

    // sweep
    if (sections.contains("sweep")) {
        cfg.sweep.variable = in.choice<SweepVariable>(
            "sweep", "variable", {{"f_L", SweepVariable::DriveFrequency}, {"dt1", SweepVariable::Dt1}},
            SweepVariable::DriveFrequency, true);
        cfg.sweep.start = in.number("sweep", "start", true).value_or(0.0);
        cfg.sweep.stop = in.number("sweep", "stop", true).value_or(0.0);
        cfg.sweep.points = in.integer("sweep", "points", true).value_or(0);
        cfg.sweep.refine_peaks = in.boolean("sweep", "refine_peaks").value_or(false);
        cfg.sweep.refine_orders = in.integer("sweep", "refine_orders", false).value_or(6);
        cfg.sweep.refine_window = in.number("sweep", "refine_window", false).value_or(0.05);
        cfg.sweep.refine_factor = in.integer("sweep", "refine_factor", false).value_or(8);
        if (!(cfg.sweep.start > 0.0)) bad.push_back("[sweep] start must be > 0");
        if (!(cfg.sweep.stop >= cfg.sweep.start)) bad.push_back("[sweep] stop must be >= start");
        if (cfg.sweep.points < 1) bad.push_back("[sweep] points must be >= 1");
        if (cfg.sweep.points == 1 && cfg.sweep.stop != cfg.sweep.start)
            bad.push_back("[sweep] a single point needs start = stop");
        if (cfg.sweep.refine_orders < 1) bad.push_back("[sweep] refine_orders must be >= 1");
        if (!(cfg.sweep.refine_window > 0.0 && cfg.sweep.refine_window < 1.0))
            bad.push_back("[sweep] refine_window must be in (0, 1)");
        if (cfg.sweep.refine_factor < 1) bad.push_back("[sweep] refine_factor must be >= 1");
        const bool square = cfg.drive.kind == DriveKind::AsymmetricSquare;
        if (square != (cfg.sweep.variable == SweepVariable::Dt1))
            bad.push_back("[sweep] variable must be f_L for tanh drives and dt1 for asymmetric_square");
    }

    // baths
    for (const char* name : {"bath.1", "bath.2"}) {
        if (!sections.contains(name)) continue;
        const std::string sec = name;
        BathBlock b;
        b.kappa = in.number(sec, "kappa", true).value_or(-1.0);
        b.T_mK = in.number(sec, "T_mK", true).value_or(0.0);
        b.filter_Q = in.number(sec, "filter_Q", false);
        b.filter_f_GHz = in.number(sec, "filter_f_GHz", false);
        b.active_branch = in.choice<ActiveBranch>(sec, "active_branch",
                                                  {{"always", ActiveBranch::Always},
                                                   {"low_gap", ActiveBranch::OnlyLowGap},
                                                   {"high_gap", ActiveBranch::OnlyHighGap}},
                                                  ActiveBranch::Always, false);
        b.pure_dephasing = in.boolean(sec, "pure_dephasing").value_or(false);
        if (!(b.kappa >= 0.0)) bad.push_back("[" + sec + "] kappa must be >= 0");
        if (!(b.T_mK > 0.0)) bad.push_back("[" + sec + "] T_mK must be > 0");
        if (b.filter_Q.has_value() != b.filter_f_GHz.has_value())
            bad.push_back("[" + sec + "] filter_Q and filter_f_GHz go together");
        if (b.filter_Q && !(*b.filter_Q > 0.0)) bad.push_back("[" + sec + "] filter_Q must be > 0");
        if (b.filter_f_GHz && !(*b.filter_f_GHz > 0.0)) bad.push_back("[" + sec + "] filter_f_GHz must be > 0");
        cfg.baths.push_back(b);
    }

    // integrator
    cfg.integrator.steps_per_cycle = in.integer("integrator", "steps_per_cycle", false).value_or(4096);
    cfg.integrator.convergence_tol = in.number("integrator", "tol", false).value_or(1e-10);
    cfg.integrator.max_cycles = in.integer("integrator", "max_cycles", false).value_or(20000);
    if (cfg.integrator.steps_per_cycle < 256) bad.push_back("[integrator] steps_per_cycle must be >= 256");
    if (!(cfg.integrator.convergence_tol > 0.0 && cfg.integrator.convergence_tol <= 1e-4))
        bad.push_back("[integrator] tol must be in (0, 1e-4]");
    if (cfg.integrator.max_cycles < 1) bad.push_back("[integrator] max_cycles must be >= 1");

    // output
    cfg.output.csv = in.text("output", "csv", false).value_or(cfg.output.csv);
    cfg.output.trajectory = in.text("output", "trajectory", false).value_or(cfg.output.trajectory);
    cfg.output.sample_stride = in.integer("output", "sample_stride", false).value_or(1);
    if (cfg.output.sample_stride < 1) bad.push_back("[output] sample_stride must be >= 1");

    // study
    if (sections.contains("study")) {
        StudyBlock s;
        s.gap_ratio = in.choice<bool>("study", "variable", {{"gap_ratio", true}, {"a", false}}, true, true);
        s.values = in.number_list("study", "values");
        if (in.has("study", "orders")) {
            s.orders.clear();
            for (double v : in.number_list("study", "orders")) s.orders.push_back(static_cast<int>(std::lround(v)));
        }
        s.half_width = in.number("study", "half_width", false).value_or(s.half_width);
        s.grid_points = in.integer("study", "grid_points", false).value_or(s.grid_points);
        if (s.values.empty()) bad.push_back("[study] values is required");
        for (double v : s.values)
            if (s.gap_ratio ? !(v > 1.0) : !(v > 0.0)) {
                bad.push_back("[study] values must be > 1 for gap_ratio and > 0 for a");
                break;
            }
        for (int n : s.orders)
            if (n < 1) {
                bad.push_back("[study] orders must be >= 1");
                break;
            }
        if (!(s.half_width > 0.0 && s.half_width < 0.5)) bad.push_back("[study] half_width must be in (0, 0.5)");
        if (s.grid_points < 5) bad.push_back("[study] grid_points must be >= 5");
        if (cfg.drive.kind != DriveKind::Tanh) bad.push_back("[study] needs kind = tanh");
        cfg.study = s;
    }

    if (!bad.empty()) throw ValidationError(std::move(bad));
    return cfg;
}

ExperimentConfig load_config(const std::string& path_or_preset) {
    if (auto text = preset_text(path_or_preset)) return parse_config(*text);
    std::ifstream in(path_or_preset, std::ios::binary);
    if (!in) {
        std::string names;
        for (const auto& n : preset_names()) names += " " + n;
        throw ValidationError({"cannot open config '" + path_or_preset + "' (presets:" + names + ")"});
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

QubitDriveModel build_model(const ExperimentConfig& cfg, std::optional<double> sweep_value) {
    QubitDriveModel m;
    m.omega0 = units::ghz_to_angular(cfg.qubit.omega0_GHz);
    m.g = units::ghz_to_angular(cfg.qubit.g_GHz);
    if (cfg.drive.kind == DriveKind::Tanh) {
        const auto f = sweep_value ? sweep_value : cfg.drive.f_GHz;
        if (!f) throw ValidationError({"[drive] f_GHz is needed for a single-point run"});
        m.drive = TanhCosine{cfg.drive.a, units::ghz_to_angular(*f)};
    } else {
        const auto dt1 = sweep_value ? sweep_value : cfg.drive.dt1_ns;
        if (!dt1) throw ValidationError({"[drive] dt1_ns is needed for a single-point run"});
        m.drive = AsymmetricSquare{*dt1, cfg.drive.dt2_ns};
    }
    validate(m);
    return m;
}

std::vector<BathCoupling> build_baths(const ExperimentConfig& cfg) {
    std::vector<BathCoupling> out;
    for (const auto& b : cfg.baths) {
        BathCoupling c;
        c.kappa = b.kappa;
        c.thermal = units::millikelvin_to_angular(b.T_mK);
        if (b.filter_Q) c.filter = ResonatorFilter{*b.filter_Q, units::ghz_to_angular(*b.filter_f_GHz)};
        c.active_branch = b.active_branch;
        c.pure_dephasing = b.pure_dephasing;
        validate(c);
        out.push_back(c);
    }
    return out;
}

std::uint64_t config_hash(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qheat
