#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace morkit
{

/// A parameter value: named, flat real vectors.
///
/// Components are kept in a sorted map so iteration order (and therefore
/// sampling order and serialization) is deterministic.
class Parameter
{
   public:
    Parameter() = default;

    /// Throws InvalidArgument on non-finite entries.
    Parameter(std::map<std::string, std::vector<double>> components);

    const std::vector<double>& at(const std::string& name) const;
    bool has(const std::string& name) const { return components_.count(name) != 0; }
    const std::map<std::string, std::vector<double>>& components() const { return components_; }

    bool operator==(const Parameter& other) const = default;

    std::string to_string() const;

   private:
    std::map<std::string, std::vector<double>> components_;
};

struct ParameterRange
{
    std::vector<std::size_t> shape;
    double low = 0.0;
    double high = 0.0;

    std::size_t size() const;
};

/// Box-constrained parameter domain.
class ParameterSpace
{
   public:
    ParameterSpace() = default;
    ParameterSpace(std::map<std::string, ParameterRange> ranges);

    const std::map<std::string, ParameterRange>& ranges() const { return ranges_; }
    std::size_t total_dim() const;
    bool contains(const Parameter& mu, double tol = 0.0) const;

    /// Tensor grid with k points per scalar dimension, both endpoints included.
    /// Lexicographic order with the first scalar dimension varying slowest.
    /// k == 1 yields the lower bound.
    std::vector<Parameter> sample_uniformly(std::size_t k) const;

    /// n i.i.d. uniform draws, xoshiro256** seeded through splitmix64.
    std::vector<Parameter> sample_randomly(std::size_t n, std::uint64_t seed) const;

   private:
    Parameter from_flat(const std::vector<double>& flat) const;

    std::map<std::string, ParameterRange> ranges_;
};

/// theta_q(mu): pure, deterministic scalar function of a parameter.
class ParameterFunctional
{
   public:
    enum class Kind
    {
        constant,
        projection,
        min,
        max,
        product,
        affine
    };

    static ParameterFunctional constant(double value);
    static ParameterFunctional projection(std::string component, std::size_t index);
    /// min over all entries of a component
    static ParameterFunctional min_of(std::string component);
    static ParameterFunctional max_of(std::string component);
    static ParameterFunctional product(std::vector<ParameterFunctional> factors);
    /// offset + sum_i coefficients[i] * terms[i]
    static ParameterFunctional affine(double offset, std::vector<double> coefficients,
                                      std::vector<ParameterFunctional> terms);

    double evaluate(const Parameter& mu) const;
    Kind kind() const { return kind_; }
    bool is_parametric() const;

    nlohmann::json to_json() const;
    static ParameterFunctional from_json(const nlohmann::json& j);

   private:
    Kind kind_ = Kind::constant;
    double value_ = 1.0;
    std::string component_;
    std::size_t index_ = 0;
    std::vector<double> coefficients_;
    std::vector<ParameterFunctional> children_;
};

nlohmann::json to_json(const Parameter& mu);
Parameter parameter_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ParameterSpace& space);
ParameterSpace parameter_space_from_json(const nlohmann::json& j);

}  // namespace morkit
