#include "smrm/modelfile.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smrm/errors.hpp"

namespace smrm {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(strip(cur));
    return parts;
}

double parse_number(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("invalid number for ") + what + ": '" + s + "'");
    }
}

std::vector<double> parse_params(const std::string& s, const char* what) {
    std::vector<double> out;
    if (strip(s).empty()) return out;
    for (const auto& part : split(s, ','))
        out.push_back(parse_number(part, what));
    return out;
}

RewardDist make_family(const std::string& name, const std::string& args) {
    if (name == "dirac-zero") return DiracZero{};
    if (name == "binomial") {
        const auto p = parse_params(args, "binomial");
        if (p.size() != 2) throw ParseError("binomial expects (n, p)");
        if (p[0] < 0 || p[0] != std::floor(p[0])) throw ParseError("binomial n must be a natural");
        return Binomial{static_cast<std::uint64_t>(p[0]), p[1]};
    }
    if (name == "geometric") {
        const auto p = parse_params(args, "geometric");
        if (p.size() != 1) throw ParseError("geometric expects (p)");
        return Geometric{p[0]};
    }
    if (name == "discrete-weibull") {
        const auto p = parse_params(args, "discrete-weibull");
        if (p.size() != 2) throw ParseError("discrete-weibull expects (q, b)");
        return DiscreteWeibull{p[0], p[1]};
    }
    if (name == "discrete-gumbel") {
        const auto p = parse_params(args, "discrete-gumbel");
        if (p.size() == 1) return DiscreteGumbel{p[0], 5.0};
        if (p.size() == 2) return DiscreteGumbel{p[0], p[1]};
        throw ParseError("discrete-gumbel expects (p) or (p, a)");
    }
    if (name == "uniform-mixture") {
        // components separated by ';', each a (weight, lo, hi) triple
        UniformMixture mix;
        for (const auto& comp : split(args, ';')) {
            const auto p = parse_params(comp, "uniform-mixture");
            if (p.size() != 3) throw ParseError("uniform-mixture component expects w, lo, hi");
            mix.components.push_back({p[0], p[1], p[2]});
        }
        if (mix.components.empty()) throw ParseError("uniform-mixture has no components");
        return mix;
    }
    if (name == "exponential") {
        const auto p = parse_params(args, "exponential");
        if (p.size() != 1) throw ParseError("exponential expects (rate)");
        return Exponential{p[0]};
    }
    if (name == "weibull") {
        const auto p = parse_params(args, "weibull");
        if (p.size() != 2) throw ParseError("weibull expects (shape, scale)");
        return WeibullCont{p[0], p[1]};
    }
    throw ParseError("unknown reward family '" + name + "'");
}

} // namespace

RewardDist parse_reward_spec(const std::string& raw) {
    const std::string spec = strip(raw);
    if (spec.rfind("lattice(", 0) == 0 && spec.back() == ')') {
        std::string inner = strip(spec.substr(8, spec.size() - 9));
        if (inner.size() < 2 || inner.front() != '[' || inner.back() != ']')
            throw ParseError("lattice expects a [v0, v1, ...] vector");
        ExplicitLattice lat;
        lat.pmf = parse_params(inner.substr(1, inner.size() - 2), "lattice");
        if (lat.pmf.empty()) throw ParseError("lattice vector is empty");
        return lat;
    }
    if (spec.rfind("family(", 0) == 0 && spec.back() == ')') {
        const std::string inner = spec.substr(7, spec.size() - 8);
        const auto comma = inner.find(',');
        const std::string name = strip(comma == std::string::npos ? inner : inner.substr(0, comma));
        const std::string args = comma == std::string::npos ? "" : inner.substr(comma + 1);
        return make_family(name, args);
    }
    throw ParseError("reward spec must be family(...) or lattice([...]): '" + spec + "'");
}

std::string format_reward_spec(const RewardDist& dist) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DiracZero>) {
                os << "family(dirac-zero)";
            } else if constexpr (std::is_same_v<T, ExplicitLattice>) {
                os << "lattice([";
                for (std::size_t i = 0; i < d.pmf.size(); ++i)
                    os << (i ? ", " : "") << d.pmf[i];
                os << "])";
            } else if constexpr (std::is_same_v<T, Binomial>) {
                os << "family(binomial, " << d.n << ", " << d.p << ")";
            } else if constexpr (std::is_same_v<T, Geometric>) {
                os << "family(geometric, " << d.p << ")";
            } else if constexpr (std::is_same_v<T, DiscreteWeibull>) {
                os << "family(discrete-weibull, " << d.q << ", " << d.b << ")";
            } else if constexpr (std::is_same_v<T, DiscreteGumbel>) {
                os << "family(discrete-gumbel, " << d.p << ", " << d.a << ")";
            } else if constexpr (std::is_same_v<T, UniformMixture>) {
                os << "family(uniform-mixture, ";
                for (std::size_t i = 0; i < d.components.size(); ++i) {
                    const auto& c = d.components[i];
                    os << (i ? "; " : "") << c.weight << ", " << c.lo << ", " << c.hi;
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, Exponential>) {
                os << "family(exponential, " << d.rate << ")";
            } else { // WeibullCont
                os << "family(weibull, " << d.shape << ", " << d.scale << ")";
            }
        },
        dist);
    return os.str();
}

Smrm parse_model(std::istream& in) {
    Smrm model;
    std::string line;
    bool in_transitions = false;
    std::size_t line_no = 0;
    struct PendingTransition {
        std::string src, dst;
        double prob;
        RewardDist reward;
    };
    std::vector<PendingTransition> transitions;
    std::vector<std::pair<std::string, double>> initial;
    std::vector<std::string> target_names;

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;

        auto fail = [&](const std::string& msg) {
            std::ostringstream os;
            os << "line " << line_no << ": " << msg;
            throw ParseError(os.str());
        };

        if (line.rfind("states:", 0) == 0) {
            in_transitions = false;
            std::istringstream is(line.substr(7));
            std::string name;
            while (is >> name) model.states.push_back(name);
            continue;
        }
        if (line.rfind("target:", 0) == 0) {
            in_transitions = false;
            std::istringstream is(line.substr(7));
            std::string name;
            while (is >> name) target_names.push_back(name);
            continue;
        }
        if (line.rfind("initial:", 0) == 0) {
            in_transitions = false;
            std::istringstream is(line.substr(8));
            std::string entry;
            while (is >> entry) {
                const auto eq = entry.find('=');
                if (eq == std::string::npos) fail("initial entries look like state=prob");
                initial.push_back(
                    {entry.substr(0, eq), parse_number(entry.substr(eq + 1), "initial")});
            }
            continue;
        }
        if (line == "transitions:") {
            in_transitions = true;
            continue;
        }
        if (!in_transitions) fail("unexpected content outside a block: '" + line + "'");

        const auto arrow = line.find("->");
        if (arrow == std::string::npos) fail("transition lines look like src -> dst ...");
        PendingTransition t;
        t.src = strip(line.substr(0, arrow));
        std::string rest = strip(line.substr(arrow + 2));
        const auto first_space = rest.find_first_of(" \t");
        if (first_space == std::string::npos) fail("transition needs prob= and reward=");
        t.dst = strip(rest.substr(0, first_space));
        rest = strip(rest.substr(first_space));

        const auto prob_pos = rest.find("prob=");
        const auto reward_pos = rest.find("reward=");
        if (prob_pos == std::string::npos || reward_pos == std::string::npos)
            fail("transition needs prob= and reward=");
        std::string prob_str = prob_pos < reward_pos
                                   ? rest.substr(prob_pos + 5, reward_pos - prob_pos - 5)
                                   : rest.substr(prob_pos + 5);
        t.prob = parse_number(strip(prob_str), "prob");
        try {
            t.reward = parse_reward_spec(strip(rest.substr(reward_pos + 7)));
        } catch (const ParseError& e) {
            fail(e.what());
        }
        transitions.push_back(std::move(t));
    }

    if (model.states.empty()) throw ParseError("model has no states block");
    const std::size_t n = model.num_states();
    model.transition_probs.assign(n, Vec(n, 0.0));

    auto index_of = [&](const std::string& name) {
        const auto idx = model.state_index(name);
        if (!idx) throw ParseError("unknown state '" + name + "'");
        return *idx;
    };
    for (const auto& t : transitions) {
        const std::size_t s = index_of(t.src), d = index_of(t.dst);
        model.transition_probs[s][d] += t.prob;
        model.rewards[{s, d}] = t.reward;
    }
    for (const auto& name : target_names) model.target_set.insert(index_of(name));
    if (!initial.empty()) {
        model.initial_dist.assign(n, 0.0);
        for (const auto& [name, p] : initial) model.initial_dist[index_of(name)] = p;
    }
    return model;
}

Smrm load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    return parse_model(in);
}

void write_model(std::ostream& out, const Smrm& model) {
    out << "states:";
    for (const auto& s : model.states) out << ' ' << s;
    out << "\ntarget:";
    for (std::size_t b : model.target_set) out << ' ' << model.states[b];
    out << '\n';
    if (!model.initial_dist.empty()) {
        out << "initial:";
        for (std::size_t s = 0; s < model.initial_dist.size(); ++s)
            if (model.initial_dist[s] != 0.0)
                out << ' ' << model.states[s] << '=' << model.initial_dist[s];
        out << '\n';
    }
    out << "transitions:\n";
    out.precision(17);
    for (std::size_t s = 0; s < model.num_states(); ++s)
        for (std::size_t t = 0; t < model.num_states(); ++t) {
            const double p = model.prob(s, t);
            if (p <= 0.0) continue;
            out << "  " << model.states[s] << " -> " << model.states[t] << " prob=" << p
                << " reward=" << format_reward_spec(model.rewards.at({s, t})) << '\n';
        }
}

void save_model(const std::string& path, const Smrm& model) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write model file '" + path + "'");
    write_model(out, model);
}

} // namespace smrm
