#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmarg {

/// Axis-aligned half-open support box [lower, upper) in s dimensions.
class Box {
public:
    Box(std::vector<double> lower, std::vector<double> upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.empty() || lower_.size() != upper_.size())
            throw std::invalid_argument("Box: lower/upper must be non-empty and equal length");
        for (std::size_t i = 0; i < lower_.size(); ++i) {
            if (!(lower_[i] < upper_[i]))
                throw std::invalid_argument("Box: lower[" + std::to_string(i) +
                                            "] must be < upper[" + std::to_string(i) + "]");
            if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
                throw std::invalid_argument("Box: bounds must be finite");
        }
    }

    /// Unit cube [0,1)^s.
    static Box unit(std::size_t dims) {
        return Box(std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0));
    }

    /// Same interval [a,b) replicated over all axes.
    static Box cube(std::size_t dims, double a, double b) {
        return Box(std::vector<double>(dims, a), std::vector<double>(dims, b));
    }

    std::size_t dims() const { return lower_.size(); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    double lower(std::size_t k) const { return lower_.at(k); }
    double upper(std::size_t k) const { return upper_.at(k); }
    double width(std::size_t k) const { return upper_.at(k) - lower_.at(k); }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < dims(); ++i) v *= width(i);
        return v;
    }

    /// Volume of the box with axis k removed.
    double reducedVolume(std::size_t k) const {
        double v = 1.0;
        for (std::size_t i = 0; i < dims(); ++i)
            if (i != k) v *= width(i);
        return v;
    }

    bool contains(std::span<const double> point) const {
        if (point.size() != dims()) return false;
        for (std::size_t i = 0; i < dims(); ++i)
            if (point[i] < lower_[i] || point[i] >= upper_[i]) return false;
        return true;
    }

    bool operator==(const Box& other) const {
        return lower_ == other.lower_ && upper_ == other.upper_;
    }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

}  // namespace qmarg
