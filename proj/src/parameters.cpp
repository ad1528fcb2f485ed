#include "morkit/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "morkit/errors.hpp"
#include "morkit/random.hpp"

namespace morkit
{

double Xoshiro256::normal()
{
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Parameter::Parameter(std::map<std::string, std::vector<double>> components)
    : components_(std::move(components))
{
    for (const auto& [name, values] : components_)
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidArgument("parameter component '" + name + "' is not finite");
}

const std::vector<double>& Parameter::at(const std::string& name) const
{
    auto it = components_.find(name);
    if (it == components_.end()) throw MissingParameter("parameter component '" + name + "' missing");
    return it->second;
}

std::string Parameter::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    os << "{";
    bool first_component = true;
    for (const auto& [name, values] : components_) {
        if (!first_component) os << ", ";
        first_component = false;
        os << name << ": [";
        for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
        os << "]";
    }
    os << "}";
    return os.str();
}

std::size_t ParameterRange::size() const
{
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

ParameterSpace::ParameterSpace(std::map<std::string, ParameterRange> ranges) : ranges_(std::move(ranges))
{
    for (const auto& [name, r] : ranges_)
        if (!(r.low <= r.high)) throw InvalidArgument("parameter range '" + name + "' has low > high");
}

std::size_t ParameterSpace::total_dim() const
{
    std::size_t n = 0;
    for (const auto& [name, r] : ranges_) n += r.size();
    return n;
}

bool ParameterSpace::contains(const Parameter& mu, double tol) const
{
    for (const auto& [name, r] : ranges_) {
        if (!mu.has(name)) return false;
        const auto& v = mu.at(name);
        if (v.size() != r.size()) return false;
        for (double x : v)
            if (x < r.low - tol || x > r.high + tol) return false;
    }
    return true;
}

Parameter ParameterSpace::from_flat(const std::vector<double>& flat) const
{
    std::map<std::string, std::vector<double>> components;
    std::size_t offset = 0;
    for (const auto& [name, r] : ranges_) {
        const auto n = r.size();
        components.emplace(name, std::vector<double>(flat.begin() + offset, flat.begin() + offset + n));
        offset += n;
    }
    return Parameter(std::move(components));
}

std::vector<Parameter> ParameterSpace::sample_uniformly(std::size_t k) const
{
    if (k == 0) throw InvalidArgument("sample_uniformly needs k >= 1");
    std::vector<double> lows, highs;
    for (const auto& [name, r] : ranges_)
        for (std::size_t i = 0; i < r.size(); ++i) {
            lows.push_back(r.low);
            highs.push_back(r.high);
        }
    const std::size_t dims = lows.size();

    auto grid_value = [&](std::size_t d, std::size_t i) {
        if (k == 1) return lows[d];
        if (i == k - 1) return highs[d];
        return lows[d] + (highs[d] - lows[d]) * static_cast<double>(i) / static_cast<double>(k - 1);
    };

    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= k;

    std::vector<Parameter> result;
    result.reserve(total);
    std::vector<std::size_t> counter(dims, 0);
    std::vector<double> flat(dims);
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t d = 0; d < dims; ++d) flat[d] = grid_value(d, counter[d]);
        result.push_back(from_flat(flat));
        // odometer, last dimension fastest
        for (std::size_t d = dims; d-- > 0;) {
            if (++counter[d] < k) break;
            counter[d] = 0;
        }
    }
    return result;
}

std::vector<Parameter> ParameterSpace::sample_randomly(std::size_t n, std::uint64_t seed) const
{
    Xoshiro256 rng(seed);
    std::vector<Parameter> result;
    result.reserve(n);
    std::vector<double> flat;
    for (std::size_t s = 0; s < n; ++s) {
        flat.clear();
        for (const auto& [name, r] : ranges_)
            for (std::size_t i = 0; i < r.size(); ++i) flat.push_back(rng.uniform(r.low, r.high));
        result.push_back(from_flat(flat));
    }
    return result;
}

ParameterFunctional ParameterFunctional::constant(double value)
{
    ParameterFunctional f;
    f.kind_ = Kind::constant;
    f.value_ = value;
    return f;
}

ParameterFunctional ParameterFunctional::projection(std::string component, std::size_t index)
{
    ParameterFunctional f;
    f.kind_ = Kind::projection;
    f.component_ = std::move(component);
    f.index_ = index;
    return f;
}

ParameterFunctional ParameterFunctional::min_of(std::string component)
{
    ParameterFunctional f;
    f.kind_ = Kind::min;
    f.component_ = std::move(component);
    return f;
}

ParameterFunctional ParameterFunctional::max_of(std::string component)
{
    ParameterFunctional f;
    f.kind_ = Kind::max;
    f.component_ = std::move(component);
    return f;
}

ParameterFunctional ParameterFunctional::product(std::vector<ParameterFunctional> factors)
{
    ParameterFunctional f;
    f.kind_ = Kind::product;
    f.children_ = std::move(factors);
    return f;
}

ParameterFunctional ParameterFunctional::affine(double offset, std::vector<double> coefficients,
                                                std::vector<ParameterFunctional> terms)
{
    if (coefficients.size() != terms.size())
        throw InvalidArgument("affine functional: coefficient/term count mismatch");
    ParameterFunctional f;
    f.kind_ = Kind::affine;
    f.value_ = offset;
    f.coefficients_ = std::move(coefficients);
    f.children_ = std::move(terms);
    return f;
}

double ParameterFunctional::evaluate(const Parameter& mu) const
{
    switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::projection: {
            const auto& v = mu.at(component_);
            if (index_ >= v.size())
                throw IndexOutOfRange("projection index out of range for component '" + component_ + "'");
            return v[index_];
        }
        case Kind::min:
        case Kind::max: {
            const auto& v = mu.at(component_);
            if (v.empty()) throw InvalidArgument("min/max of empty component '" + component_ + "'");
            return kind_ == Kind::min ? *std::min_element(v.begin(), v.end())
                                      : *std::max_element(v.begin(), v.end());
        }
        case Kind::product: {
            double p = 1.0;
            for (const auto& c : children_) p *= c.evaluate(mu);
            return p;
        }
        case Kind::affine: {
            double s = value_;
            for (std::size_t i = 0; i < children_.size(); ++i) s += coefficients_[i] * children_[i].evaluate(mu);
            return s;
        }
    }
    return 0.0;
}

bool ParameterFunctional::is_parametric() const
{
    switch (kind_) {
        case Kind::constant:
            return false;
        case Kind::product:
        case Kind::affine:
            return std::any_of(children_.begin(), children_.end(),
                               [](const auto& c) { return c.is_parametric(); });
        default:
            return true;
    }
}

nlohmann::json ParameterFunctional::to_json() const
{
    using nlohmann::json;
    switch (kind_) {
        case Kind::constant:
            return json{{"kind", "constant"}, {"value", value_}};
        case Kind::projection:
            return json{{"kind", "projection"}, {"component", component_}, {"index", index_}};
        case Kind::min:
            return json{{"kind", "min"}, {"component", component_}};
        case Kind::max:
            return json{{"kind", "max"}, {"component", component_}};
        case Kind::product: {
            json factors = json::array();
            for (const auto& c : children_) factors.push_back(c.to_json());
            return json{{"kind", "product"}, {"factors", factors}};
        }
        case Kind::affine: {
            json terms = json::array();
            for (const auto& c : children_) terms.push_back(c.to_json());
            return json{{"kind", "affine"}, {"offset", value_}, {"coefficients", coefficients_}, {"terms", terms}};
        }
    }
    return {};
}

ParameterFunctional ParameterFunctional::from_json(const nlohmann::json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "projection") return projection(j.at("component").get<std::string>(), j.at("index").get<std::size_t>());
    if (kind == "min") return min_of(j.at("component").get<std::string>());
    if (kind == "max") return max_of(j.at("component").get<std::string>());
    if (kind == "product") {
        std::vector<ParameterFunctional> factors;
        for (const auto& c : j.at("factors")) factors.push_back(from_json(c));
        return product(std::move(factors));
    }
    if (kind == "affine") {
        std::vector<ParameterFunctional> terms;
        for (const auto& c : j.at("terms")) terms.push_back(from_json(c));
        return affine(j.at("offset").get<double>(), j.at("coefficients").get<std::vector<double>>(), std::move(terms));
    }
    throw InvalidArgument("unknown parameter functional kind '" + kind + "'");
}

nlohmann::json to_json(const Parameter& mu)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, values] : mu.components()) j[name] = values;
    return j;
}

Parameter parameter_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw InvalidArgument("parameter must be a JSON object");
    std::map<std::string, std::vector<double>> components;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_number())
            components.emplace(it.key(), std::vector<double>{it.value().get<double>()});
        else
            components.emplace(it.key(), it.value().get<std::vector<double>>());
    }
    return Parameter(std::move(components));
}

nlohmann::json to_json(const ParameterSpace& space)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, r] : space.ranges())
        j[name] = {{"shape", r.shape}, {"low", r.low}, {"high", r.high}};
    return j;
}

ParameterSpace parameter_space_from_json(const nlohmann::json& j)
{
    std::map<std::string, ParameterRange> ranges;
    for (auto it = j.begin(); it != j.end(); ++it) {
        ParameterRange r;
        r.shape = it.value().at("shape").get<std::vector<std::size_t>>();
        r.low = it.value().at("low").get<double>();
        r.high = it.value().at("high").get<double>();
        ranges.emplace(it.key(), r);
    }
    return ParameterSpace(std::move(ranges));
}

}  // namespace morkit
