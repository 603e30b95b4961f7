#ifndef MMBM_MODEL_IO_HPP
#define MMBM_MODEL_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "mmbm/model.hpp"
#include "mmbm/reflection.hpp"

namespace mmbm {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parsed model document:
/// {"states": [{"label","mu","sigma2"}...], "Q": [[...]],
///  "B": number, "x0": number?, "q": number?}
/// Unknown keys are rejected, all numbers must be finite.
struct ModelDocument {
    MmbmModel model;
    double B = 1.0;
    std::optional<double> x0;
    std::optional<double> q;
};

ModelDocument parse_model_document(const std::string& json_text);
ModelDocument load_model_document(const std::string& path);
std::string dump_model_document(const ModelDocument& doc);

/// Reals formatted with 17 significant digits (CSV round-trip stable).
std::string format_real(double v);

}  // namespace mmbm

#endif
