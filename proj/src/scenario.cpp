#include "liesync/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"

namespace liesync {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": cannot parse number '" + value + "'");
    }
}

long parse_long(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": cannot parse integer '" + value + "'");
    }
}

std::vector<double> parse_number_list(const std::string& value, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, where));
    }
    return out;
}

// matrix literal: rows separated by ';', entries by ',', each entry either
// "a" or "a+bi"/"a-bi"
Mat parse_matrix(const std::string& value, const std::string& where) {
    std::vector<std::vector<Cplx>> rows;
    std::stringstream ss(value);
    std::string row;
    while (std::getline(ss, row, ';')) {
        row = trim(row);
        if (row.empty()) continue;
        std::vector<Cplx> entries;
        std::stringstream rs(row);
        std::string entry;
        while (std::getline(rs, entry, ',')) {
            entry = trim(entry);
            if (entry.empty()) continue;
            double re = 0.0, im = 0.0;
            std::size_t ipos = entry.find('i');
            if (ipos == std::string::npos) {
                re = parse_double(entry, where);
            } else {
                // split at the last +/- that is not an exponent sign
                std::string body = entry.substr(0, ipos);
                std::size_t split = std::string::npos;
                for (std::size_t k = body.size(); k-- > 1;) {
                    char c = body[k];
                    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                        split = k;
                        break;
                    }
                }
                if (split == std::string::npos) {
                    im = parse_double(body.empty() ? "1" : body, where);
                } else {
                    re = parse_double(body.substr(0, split), where);
                    std::string imag = body.substr(split);
                    if (imag == "+") imag = "1";
                    if (imag == "-") imag = "-1";
                    im = parse_double(imag, where);
                }
            }
            entries.emplace_back(re, im);
        }
        if (!entries.empty()) rows.push_back(std::move(entries));
    }
    if (rows.empty()) throw ConfigError(where + ": empty matrix literal");
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw ConfigError(where + ": ragged matrix literal");
    Mat m(static_cast<int>(rows.size()), static_cast<int>(cols));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    return m;
}

struct RawSection {
    std::string header;
    int line = 0;
    std::vector<std::tuple<int, std::string, std::string>> entries;  // line, key, value
};

std::vector<RawSection> tokenize(const std::string& text) {
    std::vector<RawSection> sections;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            sections.push_back({trim(t.substr(1, t.size() - 2)), lineno, {}});
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (sections.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": entry outside a section");
        sections.back().entries.emplace_back(lineno, trim(t.substr(0, eq)),
                                             trim(t.substr(eq + 1)));
    }
    return sections;
}

std::string loc(const std::string& scenario, int line) {
    return scenario + ":" + std::to_string(line);
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    Scenario sc;
    sc.name = name;
    bool seen_model = false;

    for (const auto& section : tokenize(text)) {
        const std::string& header = section.header;
        auto require = [&](const char* field, bool ok) {
            if (!ok)
                throw ConfigError(loc(name, section.line) + ": [" + header + "] missing '" +
                                  field + "'");
        };

        if (header == "model") {
            seen_model = true;
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "group") sc.group_id = value;
                else if (key == "dim") sc.dim = static_cast<int>(parse_long(value, where));
                else if (key == "particles")
                    sc.particles = static_cast<int>(parse_long(value, where));
                else if (key == "kappa") sc.kappa = parse_double(value, where);
                else if (key == "phi") sc.phi_id = value;
                else if (key == "metric") {
                    if (value != "adapted" && value != "frobenius")
                        throw ConfigError(where + ": metric must be adapted or frobenius");
                    sc.metric_id = value;
                } else throw ConfigError(where + ": unknown key '" + key + "' in [model]");
            }
        } else if (header == "hamiltonians") {
            bool seed_seen = false;
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "mode") {
                    if (value == "zero") sc.ham_mode = Scenario::HamMode::Zero;
                    else if (value == "random") sc.ham_mode = Scenario::HamMode::Random;
                    else if (value == "random_identical")
                        sc.ham_mode = Scenario::HamMode::RandomIdentical;
                    else if (value == "frequencies")
                        sc.ham_mode = Scenario::HamMode::Frequencies;
                    else if (value == "explicit") sc.ham_mode = Scenario::HamMode::Explicit;
                    else throw ConfigError(where + ": unknown hamiltonian mode '" + value + "'");
                } else if (key == "seed") {
                    sc.ham_seed = static_cast<std::uint64_t>(parse_long(value, where));
                    seed_seen = true;
                } else if (key == "norm") sc.ham_norm = parse_double(value, where);
                else if (key == "nu") sc.frequencies = parse_number_list(value, where);
                else if (key.size() > 1 && key[0] == 'h') {
                    sc.ham_explicit.push_back(parse_matrix(value, where));
                } else throw ConfigError(where + ": unknown key '" + key + "'");
            }
            if ((sc.ham_mode == Scenario::HamMode::Random ||
                 sc.ham_mode == Scenario::HamMode::RandomIdentical) &&
                !seed_seen)
                throw ConfigError(loc(name, section.line) +
                                  ": random hamiltonians require an explicit seed");
        } else if (header == "initial") {
            bool seed_seen = false;
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "mode") {
                    if (value == "identity") sc.init_mode = Scenario::InitMode::Identity;
                    else if (value == "random") sc.init_mode = Scenario::InitMode::Random;
                    else if (value == "phases") sc.init_mode = Scenario::InitMode::Phases;
                    else if (value == "explicit") sc.init_mode = Scenario::InitMode::Explicit;
                    else throw ConfigError(where + ": unknown initial mode '" + value + "'");
                } else if (key == "seed") {
                    sc.init_seed = static_cast<std::uint64_t>(parse_long(value, where));
                    seed_seen = true;
                } else if (key == "radius") sc.init_radius = parse_double(value, where);
                else if (key == "phases") sc.phases = parse_number_list(value, where);
                else if (key == "rescale_frobenius_diameter")
                    sc.rescale_frobenius_diameter = parse_double(value, where);
                else if (key == "rescale_ratio_deviation")
                    sc.rescale_ratio_deviation = parse_double(value, where);
                else if (key.size() > 1 && key[0] == 'x') {
                    sc.init_explicit.push_back(parse_matrix(value, where));
                } else throw ConfigError(where + ": unknown key '" + key + "'");
            }
            if (sc.init_mode == Scenario::InitMode::Random && !seed_seen)
                throw ConfigError(loc(name, section.line) +
                                  ": random initial data requires an explicit seed");
        } else if (header == "integrator") {
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "scheme") {
                    if (value == "lie_euler") sc.config.scheme = Scheme::LieEuler;
                    else if (value == "rkmk4") sc.config.scheme = Scheme::RKMK4;
                    else throw ConfigError(where + ": unknown scheme '" + value + "'");
                } else if (key == "dt") {
                    sc.config.dt = parse_double(value, where);
                    sc.dt_given = true;
                } else if (key == "t_final") sc.config.t_final = parse_double(value, where);
                else if (key == "record_stride")
                    sc.config.record_stride = static_cast<int>(parse_long(value, where));
                else if (key == "drift_tolerance")
                    sc.config.drift_tolerance = parse_double(value, where);
                else if (key == "chart_policy") {
                    if (value == "abort") sc.config.chart_policy = ChartPolicy::Abort;
                    else if (value == "renormalize")
                        sc.config.chart_policy = ChartPolicy::Renormalize;
                    else throw ConfigError(where + ": unknown chart policy '" + value + "'");
                } else if (key == "compensated_sum")
                    sc.config.compensated_sum = (value == "true" || value == "1");
                else if (key == "blowup_norm_ceiling")
                    sc.config.blowup_norm_ceiling = parse_double(value, where);
                else throw ConfigError(where + ": unknown key '" + key + "'");
            }
        } else if (header == "output") {
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "trajectory") sc.trajectory_path = value;
                else if (key == "diagnostics") sc.diagnostics_path = value;
                else if (key == "summary") sc.summary_path = value;
                else if (key == "format") {
                    if (value != "csv" && value != "binary")
                        throw ConfigError(where + ": format must be csv or binary");
                    sc.output_format = value;
                } else throw ConfigError(where + ": unknown key '" + key + "'");
            }
        } else if (header.rfind("verify", 0) == 0) {
            VerifyBlock block;
            block.name = trim(header.substr(6));
            if (block.name.empty())
                throw ConfigError(loc(name, section.line) + ": verify block needs a name");
            for (const auto& [line, key, value] : section.entries) {
                const std::string where = loc(name, line);
                if (key == "check") block.check = value;
                else if (key == "tol") block.tol = parse_double(value, where);
                else block.params[key] = value;
            }
            if (block.check.empty())
                throw ConfigError(loc(name, section.line) + ": verify block needs 'check'");
            sc.verify.push_back(std::move(block));
        } else {
            throw ConfigError(loc(name, section.line) + ": unknown section [" + header + "]");
        }
    }
    if (!seen_model) throw ConfigError(name + ": missing [model] section");

    // references must resolve against the catalogs
    family_from_id(sc.group_id);
    phi_by_id(sc.phi_id);
    if (sc.config.t_final < 0.0) throw ConfigError(name + ": t_final must be >= 0");
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), std::filesystem::path(path).filename().string());
}

namespace {

std::vector<AlgebraElement> build_hamiltonians(const Scenario& sc,
                                               const GroupCatalogEntry& entry,
                                               const AdaptedMetric& metric) {
    const auto& desc = entry.desc;
    const int n = sc.particles;
    std::vector<AlgebraElement> hams;
    switch (sc.ham_mode) {
        case Scenario::HamMode::Zero:
            hams.assign(n, algebra_zero(desc));
            break;
        case Scenario::HamMode::Random: {
            for (int i = 0; i < n; ++i)
                hams.push_back(random_algebra_element(entry, 1.0, sc.ham_seed + i));
            double sup = 0.0;
            for (const auto& h : hams) sup = std::max(sup, metric.norm(h));
            if (sup > 0.0 && sc.ham_norm > 0.0)
                for (auto& h : hams) h = h * (sc.ham_norm / sup);
            break;
        }
        case Scenario::HamMode::RandomIdentical: {
            AlgebraElement h = random_algebra_element(entry, 1.0, sc.ham_seed);
            double norm = metric.norm(h);
            if (norm > 0.0 && sc.ham_norm > 0.0) h = h * (sc.ham_norm / norm);
            hams.assign(n, h);
            break;
        }
        case Scenario::HamMode::Frequencies: {
            if (desc->family != GroupFamily::Circle)
                throw ConfigError("hamiltonians: 'frequencies' only applies to the circle");
            if (static_cast<int>(sc.frequencies.size()) != n)
                throw ConfigError("hamiltonians: need one frequency per particle");
            for (double nu : sc.frequencies) {
                Eigen::VectorXd c(1);
                c(0) = nu;
                hams.push_back(AlgebraElement{desc, c});
            }
            break;
        }
        case Scenario::HamMode::Explicit: {
            if (static_cast<int>(sc.ham_explicit.size()) != n)
                throw ConfigError("hamiltonians: need one explicit matrix per particle");
            for (const auto& m : sc.ham_explicit)
                hams.push_back(AlgebraElement::from_matrix(desc, m));
            break;
        }
    }
    return hams;
}

double frobenius_diameter(const std::vector<GroupElement>& xs) {
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            d = std::max(d, (xs[i].m - xs[j].m).norm());
    return d;
}

double ratio_deviation(const std::vector<GroupElement>& xs) {
    double d = 0.0;
    const Mat id = Mat::Identity(xs.front().size(), xs.front().size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (i == j) continue;
            d = std::max(d, (group_mul(xs[i], group_inverse(xs[j])).m - id).norm());
        }
    return d;
}

}  // namespace

ModelSpec build_model(const Scenario& sc) {
    GroupCatalogEntry entry = make_group(sc.group_id, sc.dim);
    const InteractionFunction& phi = phi_by_id(sc.phi_id);
    AdaptedMetric metric = build_adapted_metric(jacobian_at_identity(phi, entry));
    if (sc.metric_id == "frobenius") {
        // keep the attraction constant but measure diagnostics in the raw norm
        metric.P = Eigen::MatrixXd::Identity(entry.desc->dim(), entry.desc->dim());
    }
    ModelSpec spec;
    spec.entry = std::move(entry);
    spec.n_particles = sc.particles;
    spec.kappa = sc.kappa;
    spec.phi = phi;
    spec.metric = metric;
    spec.hamiltonians = build_hamiltonians(sc, spec.entry, metric);
    spec.validate();
    return spec;
}

EnsembleState build_initial(const Scenario& sc, const ModelSpec& spec) {
    const auto& desc = spec.desc();
    EnsembleState state;
    state.t = 0.0;
    const int n = sc.particles;
    switch (sc.init_mode) {
        case Scenario::InitMode::Identity:
            state.elements.assign(n, group_identity(desc));
            break;
        case Scenario::InitMode::Phases: {
            if (desc->family != GroupFamily::Circle)
                throw ConfigError("initial: 'phases' only applies to the circle");
            if (static_cast<int>(sc.phases.size()) != n)
                throw ConfigError("initial: need one phase per particle");
            for (double theta : sc.phases) {
                Mat m(1, 1);
                m(0, 0) = std::exp(Cplx(0.0, theta));
                state.elements.emplace_back(desc, m);
            }
            break;
        }
        case Scenario::InitMode::Explicit: {
            if (static_cast<int>(sc.init_explicit.size()) != n)
                throw ConfigError("initial: need one explicit matrix per particle");
            for (const auto& m : sc.init_explicit) state.elements.emplace_back(desc, m);
            break;
        }
        case Scenario::InitMode::Random: {
            const bool rescaling =
                sc.rescale_frobenius_diameter > 0.0 || sc.rescale_ratio_deviation > 0.0;
            std::vector<AlgebraElement> dirs;
            double base_radius = rescaling ? 1.0 : sc.init_radius;
            if (!(base_radius > 0.0))
                throw ConfigError("initial: random mode needs a positive radius");
            for (int i = 0; i < n; ++i)
                dirs.push_back(random_algebra_element(spec.entry, base_radius,
                                                      sc.init_seed + i));
            auto at_scale = [&](double s) {
                std::vector<GroupElement> xs;
                xs.reserve(n);
                for (const auto& v : dirs) xs.push_back(group_exp(v * s));
                return xs;
            };
            if (!rescaling) {
                state.elements = at_scale(1.0);
                break;
            }
            const bool frob = sc.rescale_frobenius_diameter > 0.0;
            const double target =
                frob ? sc.rescale_frobenius_diameter : sc.rescale_ratio_deviation;
            auto measure = [&](double s) {
                auto xs = at_scale(s);
                return frob ? frobenius_diameter(xs) : ratio_deviation(xs);
            };
            double hi = 1.0;
            int guard = 0;
            while (measure(hi) < target && guard++ < 20) hi *= 1.5;
            if (measure(hi) < target)
                throw ConfigError("initial: rescaling target unreachable");
            double lo = 0.0;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                (measure(mid) < target ? lo : hi) = mid;
            }
            state.elements = at_scale(hi);
            break;
        }
    }
    return state;
}

// --- verify checks ---

namespace {

double require_param(const VerifyBlock& block, const std::string& key,
                     std::optional<double> fallback = std::nullopt) {
    auto it = block.params.find(key);
    if (it == block.params.end()) {
        if (fallback.has_value()) return *fallback;
        throw ConfigError("verify '" + block.name + "': missing parameter '" + key + "'");
    }
    return parse_double(it->second, "verify '" + block.name + "'");
}

// worst violation of value(t) <= envelope(t) + tol over the recorded rows
template <typename Value, typename Envelope>
CheckResult envelope_check(const VerifyBlock& block, const Trajectory& traj, Value value,
                           Envelope envelope) {
    CheckResult result;
    result.name = block.name;
    result.threshold = block.tol;
    double worst = -std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    for (const auto& state : traj.states) {
        double v = value(state);
        double e = envelope(state.t);
        if (v - e > worst) {
            worst = v - e;
            worst_t = state.t;
        }
    }
    result.measured = worst;
    result.pass = worst <= block.tol;
    result.detail = "max(value - envelope) = " + std::to_string(worst) + " at t = " +
                    std::to_string(worst_t);
    return result;
}

double circle_angle_diameter(const EnsembleState& state) {
    double d = 0.0;
    for (std::size_t i = 0; i < state.elements.size(); ++i)
        for (std::size_t j = i + 1; j < state.elements.size(); ++j) {
            Cplx ratio = state.elements[i].m(0, 0) / state.elements[j].m(0, 0);
            d = std::max(d, std::abs(std::arg(ratio)));
        }
    return d;
}

}  // namespace

CheckResult evaluate_check(const VerifyBlock& block, const ModelSpec& spec,
                           const Scenario& scenario, const Trajectory& traj) {
    const double kappa = spec.kappa;

    if (block.check == "ku_id_bound") {
        // identical-frequency Kuramoto diameter bound D0 exp(-kappa t sin(D0)/D0)
        double d0 = require_param(block, "d0",
                                  traj.states.empty()
                                      ? std::optional<double>{}
                                      : circle_angle_diameter(traj.states.front()));
        return envelope_check(
            block, traj, circle_angle_diameter,
            [&](double t) { return d0 * std::exp(-kappa * t * std::sin(d0) / d0); });
    }
    if (block.check == "two_oscillator_oracle") {
        // |Delta(t)| against the tan-half-angle solution of Delta' = -kappa sin Delta
        CheckResult result;
        result.name = block.name;
        result.threshold = block.tol;
        double delta0 = std::arg(traj.states.front().elements[0].m(0, 0) /
                                 traj.states.front().elements[1].m(0, 0));
        double worst = 0.0, worst_t = 0.0;
        for (const auto& state : traj.states) {
            double delta = std::arg(state.elements[0].m(0, 0) / state.elements[1].m(0, 0));
            double exact = 2.0 * std::atan(std::tan(delta0 / 2.0) * std::exp(-kappa * state.t));
            if (std::abs(delta - exact) > worst) {
                worst = std::abs(delta - exact);
                worst_t = state.t;
            }
        }
        result.measured = worst;
        result.pass = worst <= block.tol;
        result.detail = "max |Delta - Delta_exact| = " + std::to_string(worst) + " at t = " +
                        std::to_string(worst_t);
        return result;
    }
    if (block.check == "unitary_id_bound") {
        double d0 = require_param(block, "d0",
                                  traj.states.empty()
                                      ? std::optional<double>{}
                                      : frobenius_diameter(traj.states.front().elements));
        return envelope_check(
            block, traj,
            [](const EnsembleState& s) { return frobenius_diameter(s.elements); },
            [&](double t) {
                double d2 = d0 * d0;
                return std::sqrt(2.0 * d2 / (d2 + (2.0 - d2) * std::exp(2.0 * kappa * t)));
            });
    }
    if (block.check == "matrix_id_bound") {
        double d0 = require_param(block, "d0",
                                  traj.states.empty()
                                      ? std::optional<double>{}
                                      : ratio_deviation(traj.states.front().elements));
        const AlgebraElement h = spec.hamiltonians.front();
        auto conjugated_deviation = [&, h](const EnsembleState& s) {
            GroupElement left = group_exp(h * (-s.t));
            GroupElement right = group_exp(h * s.t);
            double d = 0.0;
            const Mat id = Mat::Identity(s.elements.front().size(), s.elements.front().size());
            for (std::size_t i = 0; i < s.elements.size(); ++i)
                for (std::size_t j = 0; j < s.elements.size(); ++j) {
                    if (i == j) continue;
                    Mat a = left.m * group_mul(s.elements[i], group_inverse(s.elements[j])).m *
                            right.m;
                    d = std::max(d, (a - id).norm());
                }
            return d;
        };
        return envelope_check(block, traj, conjugated_deviation, [&](double t) {
            return d0 / ((1.0 - d0) * std::exp(kappa * t) + d0);
        });
    }
    if (block.check == "blowup_window") {
        CheckResult result;
        result.name = block.name;
        double t_star = require_param(block, "t_star");
        double steps = require_param(block, "window_steps", 2.0);
        double window = steps * scenario.config.dt;
        result.threshold = window;
        if (!traj.event.has_value() ||
            traj.event->kind != TerminationEvent::Kind::Blowup) {
            result.pass = false;
            result.measured = std::numeric_limits<double>::quiet_NaN();
            result.detail = "no blowup event";
            return result;
        }
        result.measured = traj.event->t - t_star;
        result.pass = std::abs(result.measured) <= window;
        result.detail = "event at t = " + std::to_string(traj.event->t) + ", expected " +
                        std::to_string(t_star) + " +- " + std::to_string(window);
        return result;
    }
    if (block.check == "no_event") {
        CheckResult result;
        result.name = block.name;
        result.pass = !traj.event.has_value();
        result.measured = traj.event.has_value() ? 1.0 : 0.0;
        result.threshold = 0.0;
        result.detail = traj.event.has_value() ? traj.event->detail : "clean completion";
        return result;
    }
    if (block.check == "decay_rate_min") {
        CheckResult result;
        result.name = block.name;
        double t0 = require_param(block, "t0");
        double t1 = require_param(block, "t1");
        double min_rate = require_param(block, "min_rate");
        result.threshold = min_rate;
        try {
            std::vector<std::pair<double, double>> series;
            for (const auto& rec : traj.diagnostics)
                if (std::isfinite(rec.diameter)) series.emplace_back(rec.t, rec.diameter);
            FitResult fit = fit_decay_rate(series, t0, t1);
            result.measured = fit.rate;
            result.pass = fit.rate >= min_rate;
            result.detail = "fitted rate " + std::to_string(fit.rate) + " (r2 " +
                            std::to_string(fit.r_squared) + ")";
        } catch (const FitError& e) {
            result.pass = false;
            result.measured = std::numeric_limits<double>::quiet_NaN();
            result.detail = e.what();
        }
        return result;
    }
    throw ConfigError("unknown verify check '" + block.check + "'");
}

RunResult run_scenario(const Scenario& scenario_in, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override) {
    Scenario scenario = scenario_in;
    if (seed_override.has_value()) {
        scenario.ham_seed = *seed_override;
        scenario.init_seed = *seed_override + 1;
    }
    if (!scenario.dt_given) scenario.config.dt = IntegratorConfig::default_dt(scenario.kappa);

    RunResult result;
    result.spec = build_model(scenario);
    EnsembleState initial = build_initial(scenario, result.spec);
    result.trajectory = integrate(result.spec, initial, scenario.config);
    attach_diagnostics(result.spec, result.trajectory);

    namespace fs = std::filesystem;
    auto resolve = [&](const std::string& rel) {
        return (fs::path(out_dir) / rel).string();
    };
    if (!out_dir.empty()) fs::create_directories(out_dir);
    if (!scenario.trajectory_path.empty()) {
        if (scenario.output_format == "binary")
            write_trajectory_binary(result.trajectory, resolve(scenario.trajectory_path));
        else
            write_trajectory_csv(result.trajectory, resolve(scenario.trajectory_path));
    }
    if (!scenario.diagnostics_path.empty())
        write_diagnostics_csv(result.trajectory, resolve(scenario.diagnostics_path));

    for (const auto& block : scenario.verify)
        result.checks.push_back(evaluate_check(block, result.spec, scenario, result.trajectory));

    if (!scenario.summary_path.empty()) {
        std::FILE* f = std::fopen(resolve(scenario.summary_path).c_str(), "w");
        if (f == nullptr) throw ConfigError("cannot open summary file");
        std::fprintf(f, "scenario = %s\n", scenario.name.c_str());
        std::fprintf(f, "group = %s\n", scenario.group_id.c_str());
        std::fprintf(f, "particles = %d\n", scenario.particles);
        std::fprintf(f, "kappa = %.17g\n", scenario.kappa);
        std::fprintf(f, "lambda = %.17g\n", result.spec.metric.lambda);
        std::fprintf(f, "h_sup_norm = %.17g\n", result.spec.hamiltonian_sup_norm());
        std::fprintf(f, "dt = %.17g\n", scenario.config.dt);
        if (result.trajectory.event.has_value()) {
            std::fprintf(f, "event = %s\n",
                         result.trajectory.event->kind == TerminationEvent::Kind::Blowup
                             ? "blowup"
                             : "chart_violation");
            std::fprintf(f, "event_t = %.17g\n", result.trajectory.event->t);
            std::fprintf(f, "event_detail = %s\n", result.trajectory.event->detail.c_str());
        } else {
            std::fprintf(f, "event = none\n");
        }
        for (const auto& check : result.checks) {
            std::fprintf(f, "check.%s = %s\n", check.name.c_str(),
                         check.pass ? "pass" : "fail");
            std::fprintf(f, "check.%s.measured = %.17g\n", check.name.c_str(), check.measured);
            std::fprintf(f, "check.%s.detail = %s\n", check.name.c_str(),
                         check.detail.c_str());
        }
        std::fclose(f);
    }

    if (result.trajectory.event.has_value()) {
        result.exit_code = result.trajectory.event->kind == TerminationEvent::Kind::Blowup
                               ? kExitBlowup
                               : kExitChartViolation;
    } else {
        bool all_pass = true;
        for (const auto& check : result.checks) all_pass = all_pass && check.pass;
        result.exit_code = all_pass ? kExitOk : kExitVerifyFailure;
    }
    return result;
}

}  // namespace liesync
