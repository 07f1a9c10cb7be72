#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "singtrack/core/errors.hpp"

namespace singtrack {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

// Segment of a complex path, parameterized by arclength.
struct Segment {
    enum class Kind { Line, Arc };
    Kind kind = Kind::Line;
    cplx start{};
    cplx end{};          // Line only
    cplx center{};       // Arc only
    double radius = 0;   // Arc only
    double theta0 = 0;   // Arc start angle
    double theta1 = 0;   // Arc end angle; sign of theta1-theta0 is the orientation
    int sample_hint = 0; // number of equal-arclength nodes forced on the segment (0: none)

    static Segment line(cplx a, cplx b, int hint = 0) {
        Segment s;
        s.kind = Kind::Line;
        s.start = a;
        s.end = b;
        s.sample_hint = hint;
        return s;
    }
    static Segment arc(cplx c, double r, double t0, double t1, int hint = 0) {
        Segment s;
        s.kind = Kind::Arc;
        s.center = c;
        s.radius = r;
        s.theta0 = t0;
        s.theta1 = t1;
        s.start = c + std::polar(r, t0);
        s.end = c + std::polar(r, t1);
        s.sample_hint = hint;
        return s;
    }

    double length() const {
        return kind == Kind::Line ? std::abs(end - start) : radius * std::abs(theta1 - theta0);
    }
    cplx point(double s) const {
        if (kind == Kind::Line) {
            double L = length();
            return L > 0 ? start + (end - start) * (s / L) : start;
        }
        double dir = theta1 >= theta0 ? 1.0 : -1.0;
        return center + std::polar(radius, theta0 + dir * s / radius);
    }
    // dz/ds, unit modulus
    cplx tangent(double s) const {
        if (kind == Kind::Line) return (end - start) / length();
        double dir = theta1 >= theta0 ? 1.0 : -1.0;
        return dir * I * std::polar(1.0, theta0 + dir * s / radius);
    }
};

struct PathSpec {
    std::vector<Segment> segments;

    PathSpec& add(const Segment& s) {
        segments.push_back(s);
        return *this;
    }
    PathSpec& line_to(cplx b, int hint = 0) {
        segments.push_back(Segment::line(end(), b, hint));
        return *this;
    }

    cplx start() const { return segments.front().start; }
    cplx end() const { return segments.back().end; }

    double length() const {
        double L = 0;
        for (const auto& s : segments) L += s.length();
        return L;
    }

    bool closed(double tol = 1e-12) const {
        return !segments.empty() && std::abs(end() - start()) <= tol * (1 + std::abs(start()));
    }

    void validate() const {
        if (segments.empty()) throw Error(ErrorKind::InvalidPath, "path has no segments");
        double L = 0;
        for (size_t i = 0; i < segments.size(); ++i) {
            L += segments[i].length();
            if (i > 0) {
                cplx a = segments[i - 1].end, b = segments[i].start;
                if (std::abs(a - b) > 1e-12 * (1 + std::abs(a)))
                    throw Error(ErrorKind::InvalidPath, "segments do not share endpoints");
            }
        }
        if (!(L > 0)) throw Error(ErrorKind::InvalidPath, "path has zero arclength");
    }

    PathSpec reversed() const {
        PathSpec p;
        for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
            Segment s = *it;
            if (s.kind == Segment::Kind::Line) {
                std::swap(s.start, s.end);
            } else {
                std::swap(s.theta0, s.theta1);
                std::swap(s.start, s.end);
            }
            p.segments.push_back(s);
        }
        return p;
    }

    static PathSpec circle(cplx c, double r, double theta0 = 0.0, int hint = 0) {
        PathSpec p;
        p.add(Segment::arc(c, r, theta0, theta0 + 2 * std::numbers::pi, hint));
        return p;
    }
};

}  // namespace singtrack
