#include <ginv/spectrum.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace ginv {

namespace {

std::string fmt_double(double v) {
    // shortest representation that round-trips
    char best[64];
    std::snprintf(best, sizeof(best), "%.17g", v);
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v && std::strlen(buf) < std::strlen(best)) {
            std::memcpy(best, buf, sizeof(buf));
        }
    }
    return best;
}

}  // namespace

SpectrumSpec SpectrumSpec::canonicalize(std::vector<Atom> raw, std::string label) {
    if (raw.empty()) throw validation_error("spectrum: atom list is empty");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Atom& a = raw[i];
        if (!(std::isfinite(a.weight) && a.weight > 0.0)) {
            throw validation_error("spectrum: atom " + std::to_string(i) +
                                   " has nonpositive weight " + fmt_double(a.weight));
        }
        if (!(std::isfinite(a.eigenvalue) && a.eigenvalue > 0.0)) {
            throw validation_error("spectrum: atom " + std::to_string(i) +
                                   " has nonpositive eigenvalue " + fmt_double(a.eigenvalue));
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const Atom& a, const Atom& b) { return a.eigenvalue < b.eigenvalue; });

    SpectrumSpec spec;
    spec.label_ = std::move(label);
    for (const Atom& a : raw) {
        if (!spec.atoms_.empty()) {
            Atom& last = spec.atoms_.back();
            const double scale = std::max(last.eigenvalue, a.eigenvalue);
            if (a.eigenvalue - last.eigenvalue <= 1e-12 * scale) {
                // duplicate eigenvalue: merge weights
                last.weight += a.weight;
                continue;
            }
        }
        spec.atoms_.push_back(a);
    }
    double total = 0.0;
    for (const Atom& a : spec.atoms_) total += a.weight;
    for (Atom& a : spec.atoms_) a.weight /= total;
    return spec;
}

SpectrumSpec SpectrumSpec::identity() {
    return canonicalize({{1.0, 1.0}}, "identity");
}

SpectrumSpec SpectrumSpec::parse(const std::string& text, std::string label) {
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string pair = text.substr(pos, comma - pos);
        const std::size_t colon = pair.find(':');
        if (colon == std::string::npos) {
            throw validation_error("spectrum: expected weight:eigenvalue, got '" + pair + "'");
        }
        char* endw = nullptr;
        char* ende = nullptr;
        const std::string ws = pair.substr(0, colon);
        const std::string es = pair.substr(colon + 1);
        const double w = std::strtod(ws.c_str(), &endw);
        const double e = std::strtod(es.c_str(), &ende);
        if (ws.empty() || es.empty() || *endw != '\0' || *ende != '\0') {
            throw validation_error("spectrum: cannot parse pair '" + pair + "'");
        }
        atoms.push_back({w, e});
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return canonicalize(std::move(atoms), std::move(label));
}

std::string SpectrumSpec::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(atoms_[i].weight);
        out += ':';
        out += fmt_double(atoms_[i].eigenvalue);
    }
    return out;
}

double SpectrumSpec::inverse_moment(int k) const {
    if (k != 1 && k != 2) {
        throw validation_error("inverse_moment: unsupported order " + std::to_string(k) +
                               " (expected 1 or 2)");
    }
    return integrate([k](double tau) { return k == 1 ? 1.0 / tau : 1.0 / (tau * tau); });
}

}  // namespace ginv
