#include "npclass/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace npc {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                              std::to_string(b) + ")");
    }
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite result");
    return v;
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw InvalidArgument("distribution needs an alphabet of size >= 2");
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p <= 0.0) throw InvalidArgument("distribution weights must be finite and > 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "distribution weights sum to " << sum << ", not 1";
        throw InvalidArgument(os.str());
    }
    for (double& p : probs_) p /= sum;
}

Distribution Distribution::uniform(std::size_t alphabet_size) {
    if (alphabet_size < 2) throw InvalidArgument("distribution needs an alphabet of size >= 2");
    return Distribution(std::vector<double>(alphabet_size, 1.0 / static_cast<double>(alphabet_size)));
}

Distribution Distribution::bernoulli(double p1) { return Distribution({1.0 - p1, p1}); }

double Distribution::min_prob() const noexcept { return *std::min_element(probs_.begin(), probs_.end()); }

EmpiricalType::EmpiricalType(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw InvalidArgument("empirical type needs a non-empty alphabet");
    for (auto c : counts_) {
        if (c < 0) throw InvalidArgument("empirical type counts must be non-negative");
        n_ += c;
    }
    if (n_ < 1) throw InvalidArgument("empirical type needs a positive sample length");
}

std::vector<double> EmpiricalType::frequencies() const {
    std::vector<double> f(counts_.size());
    const double n = static_cast<double>(n_);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(counts_[i]) / n;
    return f;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    require_same_size(p.size(), q.size(), "kl_divergence");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw InvalidArgument("kl_divergence: negative weight");
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) throw DomainError("kl_divergence: left support not contained in right support");
        d += p[i] * std::log(p[i] / q[i]);
    }
    // Rounding can push a zero divergence slightly negative.
    return checked(std::max(d, 0.0), "kl_divergence");
}

double renyi_divergence(double rho, std::span<const double> p, std::span<const double> q) {
    require_same_size(p.size(), q.size(), "renyi_divergence");
    if (!(rho > 0.0)) throw InvalidArgument("renyi_divergence: order must be > 0");
    if (rho == 1.0) throw InvalidArgument("renyi_divergence: order 1 is the KL divergence");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        s += std::pow(p[i], rho) * std::pow(q[i], 1.0 - rho);
    }
    return checked(std::max(std::log(s) / (rho - 1.0), 0.0), "renyi_divergence");
}

double gjs_divergence(double alpha, std::span<const double> q, std::span<const double> p) {
    require_same_size(p.size(), q.size(), "gjs_divergence");
    if (!(alpha > 0.0)) throw InvalidArgument("gjs_divergence: alpha must be > 0");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = (q[i] + alpha * p[i]) / (1.0 + alpha);
        if (q[i] > 0.0) d += q[i] * std::log(q[i] / m);
        if (p[i] > 0.0) d += alpha * p[i] * std::log(p[i] / m);
    }
    return checked(std::max(d, 0.0), "gjs_divergence");
}

Distribution perturb_type(const EmpiricalType& t, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("perturb_type: delta must lie in (0,1)");
    const double n = static_cast<double>(t.n());
    const double floor = delta / static_cast<double>(t.alphabet_size());
    std::vector<double> out(t.alphabet_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - delta) * static_cast<double>(t.counts()[i]) / n + floor;
    return Distribution(std::move(out));
}

Distribution tilted_geometric(const Distribution& p0, const Distribution& p1, double s) {
    require_same_size(p0.size(), p1.size(), "tilted_geometric");
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("tilted_geometric: s must lie in [0,1]");
    std::vector<double> logw(p0.size());
    for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = s * std::log(p0[i]) + (1.0 - s) * std::log(p1[i]);
    const double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double& w : logw) z += (w = std::exp(w - mx));
    for (double& w : logw) w /= z;
    return Distribution(std::move(logw));
}

EmpiricalType empirical_type(const Sample& x, std::size_t alphabet_size) {
    if (x.symbols.empty()) throw InvalidArgument("empirical_type: empty sample");
    std::vector<std::int64_t> counts(alphabet_size, 0);
    for (auto s : x.symbols) {
        if (s >= alphabet_size) throw InvalidArgument("empirical_type: symbol " + std::to_string(s) + " out of range");
        ++counts[s];
    }
    return EmpiricalType(std::move(counts));
}

std::vector<double> cumulative(const Distribution& p) {
    std::vector<double> cdf(p.size());
    std::partial_sum(p.probs().begin(), p.probs().end(), cdf.begin());
    cdf.back() = 1.0;
    return cdf;
}

std::uint32_t draw_symbol(std::span<const double> cdf, RandomStream& stream) {
    const double u = stream.uniform();
    std::uint32_t a = 0;
    while (u >= cdf[a]) ++a;
    return a;
}

Sample sample_iid(const Distribution& p, std::int64_t n, RandomStream& stream) {
    if (n < 1) throw InvalidArgument("sample_iid: n must be >= 1");
    const auto cdf = cumulative(p);
    Sample out;
    out.symbols.resize(static_cast<std::size_t>(n));
    for (auto& s : out.symbols) s = draw_symbol(cdf, stream);
    return out;
}

EmpiricalType sample_type(const Distribution& p, std::int64_t n, RandomStream& stream) {
    if (n < 1) throw InvalidArgument("sample_type: n must be >= 1");
    std::vector<std::int64_t> counts(p.size(), 0);
    std::int64_t left = n;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < p.size() && left > 0; ++i) {
        const double q = std::clamp(p[i] / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::int64_t> bin(left, q);
        counts[i] = bin(stream);
        left -= counts[i];
        mass_left -= p[i];
    }
    counts.back() += left;
    return EmpiricalType(std::move(counts));
}

Distribution parse_distribution(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse distribution entry '" + tok + "'");
        }
        if (tok.find_first_not_of(" \t", used) != std::string::npos) {
            throw InvalidArgument("cannot parse distribution entry '" + tok + "'");
        }
        v.push_back(x);
    }
    return Distribution(std::move(v));
}

}  // namespace npc
