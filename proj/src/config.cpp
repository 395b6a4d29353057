#include "swm/config.hpp"

#include <fstream>
#include <sstream>

namespace swm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x) throw ConfigError("config: '" + key + "' must be an integer");
    return i;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

} // namespace

QSpectrum ExperimentConfig::make_q() const {
    if (q_law == "power") return QSpectrum::power_law(M, q_p, q_scale, sigma);
    if (q_law == "zero") {
        QSpectrum Q = QSpectrum::zero(M);
        Q.sigma = sigma;
        return Q;
    }
    throw ConfigError("config: unknown q_law '" + q_law + "' (power|zero)");
}

Nonlinearity ExperimentConfig::make_f() const {
    if (f_kind == "zero") return Nonlinearity::zero();
    if (f_kind == "sin") return Nonlinearity::scaled_sine(f_a);
    if (f_kind == "linear") return Nonlinearity::linear(f_a);
    throw ConfigError("config: unknown f_kind '" + f_kind + "' (zero|sin|linear)");
}

void ExperimentConfig::validate() const {
    if (M < 1) throw ConfigError("config: M must be >= 1");
    if (N < 1 || N > M) throw ConfigError("config: need 1 <= N <= M");
    if (phys_points() < 2 * M) throw ConfigError("config: M_phys must be >= 2M");
    if (dt <= 0.0) throw ConfigError("config: dt must be > 0");
    if (refine < 1) throw ConfigError("config: refine must be >= 1");
    if (f_kind != "zero" && !(f_a >= 0.0 && f_a <= 1.0))
        throw ConfigError("config: Lipschitz bound violated, need 0 <= f_a <= 1 (= sqrt(lambda_1))");
    if (q_law == "power" && q_p <= 1.0)
        throw ConfigError("config: q_p must be > 1 for a trace-class spectrum");
    if (q_scale < 0.0) throw ConfigError("config: q_scale must be >= 0");
    if (tol <= 0.0) throw ConfigError("config: tol must be > 0");
    if (replicas < 1) throw ConfigError("config: replicas must be >= 1");
    if (grid_per_axis < 1) throw ConfigError("config: grid_per_axis must be >= 1");
    if (R <= 0.0) throw ConfigError("config: R must be > 0");
}

void ExperimentConfig::validate_wave(double nu_value) const {
    if (!(nu_value > 0.0) || 4.0 * nu_value * (N + 1.0) * (N + 1.0) >= 1.0)
        throw ConfigError("config: need 0 < nu < 1/(4 (N+1)^2) for the wave phase space");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(ln) + " is not 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return from_map(kv);
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    for (const auto& [k, v] : kv) c.apply_override(k, v);
    return c;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    if (key == "M") M = to_int(key, value);
    else if (key == "M_phys") M_phys = to_int(key, value);
    else if (key == "N") N = to_int(key, value);
    else if (key == "dt") dt = to_double(key, value);
    else if (key == "refine") refine = to_int(key, value);
    else if (key == "T") T = to_double(key, value);
    else if (key == "T_back") T_back = to_double(key, value);
    else if (key == "T_inv") T_inv = to_double(key, value);
    else if (key == "tol") tol = to_double(key, value);
    else if (key == "max_iters") max_iters = to_int(key, value);
    else if (key == "eta") eta = to_double(key, value);
    else if (key == "pullback_T") pullback_T = to_double(key, value);
    else if (key == "pullback_tol") pullback_tol = to_double(key, value);
    else if (key == "nu") nu = to_double(key, value);
    else if (key == "nu_list") nu_list = to_list(key, value);
    else if (key == "sigma") sigma = to_double(key, value);
    else if (key == "q_law") q_law = value;
    else if (key == "q_p") q_p = to_double(key, value);
    else if (key == "q_scale") q_scale = to_double(key, value);
    else if (key == "f_kind") f_kind = value;
    else if (key == "f_a") f_a = to_double(key, value);
    else if (key == "K") K = to_double(key, value);
    else if (key == "L_F") L_F = to_double(key, value);
    else if (key == "L_h") L_h = to_double(key, value);
    else if (key == "R") R = to_double(key, value);
    else if (key == "grid_per_axis") grid_per_axis = to_int(key, value);
    else if (key == "base_amp") base_amp = to_double(key, value);
    else if (key == "replicas") replicas = to_int(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(to_double(key, value));
    else if (key == "delta") delta = to_double(key, value);
    else if (key == "samples") samples = to_int(key, value);
    else if (key == "threads") threads = to_int(key, value);
    else if (key == "out_dir") out_dir = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    auto d = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    std::map<std::string, std::string> kv;
    kv["M"] = std::to_string(M);
    kv["M_phys"] = std::to_string(phys_points());
    kv["N"] = std::to_string(N);
    kv["dt"] = d(dt);
    kv["refine"] = std::to_string(refine);
    kv["T"] = d(T);
    kv["T_back"] = d(T_back);
    kv["T_inv"] = d(T_inv);
    kv["tol"] = d(tol);
    kv["max_iters"] = std::to_string(max_iters);
    kv["eta"] = d(eta);
    kv["pullback_T"] = d(pullback_T);
    kv["pullback_tol"] = d(pullback_tol);
    kv["nu"] = d(nu);
    {
        std::string s;
        for (double x : nu_list) s += (s.empty() ? "" : ",") + d(x);
        kv["nu_list"] = s;
    }
    kv["sigma"] = d(sigma);
    kv["q_law"] = q_law;
    kv["q_p"] = d(q_p);
    kv["q_scale"] = d(q_scale);
    kv["f_kind"] = f_kind;
    kv["f_a"] = d(f_a);
    kv["K"] = d(K);
    kv["L_F"] = d(L_F);
    kv["L_h"] = d(L_h);
    kv["R"] = d(R);
    kv["grid_per_axis"] = std::to_string(grid_per_axis);
    kv["base_amp"] = d(base_amp);
    kv["replicas"] = std::to_string(replicas);
    kv["seed"] = std::to_string(seed);
    kv["delta"] = d(delta);
    kv["samples"] = std::to_string(samples);
    kv["threads"] = std::to_string(threads);
    kv["out_dir"] = out_dir;
    return kv;
}

} // namespace swm
