#ifndef FRACLAP_CERTIFICATE_HPP
#define FRACLAP_CERTIFICATE_HPP

#include <map>
#include <string>

namespace fraclap {

/// Machine-checkable verdict: pass is always a pure function of data and
/// tolerance, so stored certificates can be re-derived from their payload.
struct Certificate {
    std::string name;
    bool pass = false;
    std::map<std::string, double> data;
    double tolerance = 0.0;
};

}  // namespace fraclap

#endif
