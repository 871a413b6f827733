#include "mtbandit/harness/trace_io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mtbandit/theory.hpp"

namespace mtbandit::harness {

namespace {

template <typename Vec>
std::string joined(const Vec& v) {
    std::string s;
    for (Index i = 0; i < static_cast<Index>(v.size()); ++i) {
        if (i) s += ';';
        s += format_double(v(i));
    }
    return s;
}

std::string joined_point(const Point& p) {
    std::string s;
    for (Index i = 0; i < p.size(); ++i) {
        if (i) s += ';';
        s += format_double(p(i));
    }
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError("line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    return v;
}

constexpr const char* kSummaryHeader =
    "algorithm,t,mean_avg_regret,std_avg_regret,mean_cum_regret,realized_gain,bound_value,variance_sum";

}  // namespace

std::string trace_csv(const RunTrace& trace) {
    std::ostringstream out;
    out << "t,lambda,x,y,beta,m_t,inst_regret,cum_regret,micros\n";
    double cum = 0.0;
    for (const auto& r : trace.rounds) {
        cum += r.inst_regret;
        out << r.t << ',' << joined(r.lambda) << ',' << joined_point(r.x) << ',' << joined(r.y) << ','
            << format_double(r.beta) << ',' << r.dictionary_size << ',' << format_double(r.inst_regret) << ','
            << format_double(cum) << ',' << r.micros << '\n';
    }
    return out.str();
}

std::string dictionary_csv(const std::vector<DictionaryRow>& rows) {
    std::ostringstream out;
    out << "t,m_t,indices\n";
    for (const auto& r : rows) {
        out << r.t << ',' << r.indices.size() << ',';
        for (std::size_t i = 0; i < r.indices.size(); ++i) out << (i ? ";" : "") << r.indices[i];
        out << '\n';
    }
    return out.str();
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results,
                                  const std::vector<std::string>& algorithm_order) {
    std::vector<SummaryRow> rows;
    for (const auto& name : algorithm_order) {
        std::vector<const TrialResult*> runs;
        std::size_t horizon = 0;
        for (const auto& r : results) {
            if (r.algorithm != name) continue;
            runs.push_back(&r);
            horizon = std::max(horizon, r.trace.rounds.size());
        }
        if (runs.empty()) continue;

        // Running per-trial accumulators.
        std::vector<double> cum(runs.size(), 0.0), var_sum(runs.size(), 0.0);
        for (std::size_t t = 1; t <= horizon; ++t) {
            std::vector<double> avg, cums, gains, bounds, vars;
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const TrialResult& run = *runs[k];
                if (run.trace.rounds.size() < t) continue;  // aborted trial
                const RoundRecord& rec = run.trace.rounds[t - 1];
                cum[k] += rec.inst_regret;
                var_sum[k] += rec.post_var;
                const double gain = 0.5 * rec.logdet_sum;
                const BoundInputs in{run.config.lipschitz, run.config.b,  run.config.sigma,
                                     run.config.eta,       run.config.delta, run.kappa};
                const double bound = run.config.algorithm == Algorithm::MTKB
                                         ? regret_bound_value(in, gain, t, var_sum[k])
                                         : budgeted_regret_bound_value(in, run.config.epsilon, gain, t, var_sum[k]);
                avg.push_back(cum[k] / static_cast<double>(t));
                cums.push_back(cum[k]);
                gains.push_back(gain);
                bounds.push_back(bound);
                vars.push_back(var_sum[k]);
            }
            if (avg.empty()) break;
            rows.push_back({name, t, mean_of(avg), sample_std(avg), mean_of(cums), mean_of(gains), mean_of(bounds),
                            mean_of(vars)});
        }
    }
    return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.t << ',' << format_double(r.mean_avg_regret) << ','
            << format_double(r.std_avg_regret) << ',' << format_double(r.mean_cum_regret) << ','
            << format_double(r.realized_gain) << ',' << format_double(r.bound_value) << ','
            << format_double(r.variance_sum) << '\n';
    }
    return out.str();
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("summary is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    if (header.size() < 4 || header[0] != "algorithm" || header[1] != "t" || header[2] != "mean_avg_regret" ||
        header[3] != "std_avg_regret") {
        throw ValidationError("line 1: expected a summary header starting with algorithm,t,mean_avg_regret,std_avg_regret");
    }
    std::vector<SummaryRow> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) {
            throw ValidationError("line " + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                                  " fields, found " + std::to_string(f.size()));
        }
        if (f[0].empty()) throw ValidationError("line " + std::to_string(n) + ": empty algorithm name");
        SummaryRow r;
        r.algorithm = f[0];
        const double t = parse_number(f[1], n);
        if (!(t >= 1.0) || t != std::floor(t)) throw ValidationError("line " + std::to_string(n) + ": bad round");
        r.t = static_cast<std::size_t>(t);
        r.mean_avg_regret = parse_number(f[2], n);
        r.std_avg_regret = parse_number(f[3], n);
        if (f.size() >= 8) {
            r.mean_cum_regret = parse_number(f[4], n);
            r.realized_gain = parse_number(f[5], n);
            r.bound_value = parse_number(f[6], n);
            r.variance_sum = parse_number(f[7], n);
        }
        if (!std::isfinite(r.mean_avg_regret) || !std::isfinite(r.std_avg_regret) || r.std_avg_regret < 0.0) {
            throw ValidationError("line " + std::to_string(n) + ": regret values must be finite, std nonnegative");
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ValidationError("summary has no data rows");
    return rows;
}

std::vector<SummaryRow> read_summary(const std::string& path) { return parse_summary_csv(read_file(path)); }

std::string bayes_csv(const std::vector<TrialResult>& results, const std::vector<std::string>& algorithm_order) {
    std::ostringstream out;
    out << "algorithm,t,mean_bayes_regret,std_bayes_regret\n";
    for (const auto& name : algorithm_order) {
        std::map<std::size_t, std::vector<double>> at;
        for (const auto& r : results) {
            if (r.algorithm != name) continue;
            for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
                const double v = r.bayes(static_cast<Index>(i));
                if (std::isfinite(v)) at[r.checkpoints[i]].push_back(v);
            }
        }
        for (const auto& [t, v] : at) {
            out << name << ',' << t << ',' << format_double(mean_of(v)) << ',' << format_double(sample_std(v)) << '\n';
        }
    }
    return out.str();
}

std::string pareto_csv(const Environment& env) {
    std::ostringstream out;
    out << "index,x,f\n";
    for (std::size_t i : pareto_front(env)) {
        out << i << ',' << joined_point(env.grid[i]) << ',' << joined(env.values.col(static_cast<Index>(i))) << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << content;
    if (!out) throw InvalidInput("write to '" + path + "' failed");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw InternalError("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace mtbandit::harness
