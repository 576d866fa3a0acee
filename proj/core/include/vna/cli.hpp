#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vna/algebra.hpp"
#include "vna/dyadic.hpp"

namespace vna {

// Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 resource cap.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitResource = 4;

struct RunConfig {
  std::string command;  // eval|certify|microstates|interpolate|separation|witness|enumerate-ea
  std::string formula;  // formula literal
  std::string algebra;  // "M<n>", a "blocks: [...]" literal, or file content
  std::string algebra_b;  // interpolate/distinct: the B side
  Dyadic eps = Dyadic(1).div_pow2(4);
  int k_max = 1;
  std::vector<Dyadic> grid;
  std::uint64_t seed = 1;
  std::uint64_t budget = 4000;
  int count = 0;         // distinct-values demo; 0 = scan only
  int degree = 2;        // separation degree bound
  std::string tuple_json;     // separation tuple as JSON blocks
  std::string presentation;   // witness/enumerate-ea: code file path or "demo:..."
  std::size_t steps = 4;
  bool json_output = false;
};

struct RunReport {
  int status = kExitOk;
  std::string text;  // deterministic line-oriented report (or JSON)
};

// Runs exactly one experiment family and renders the report; never throws,
// all diagnostics are folded into the status/text pair.
RunReport dispatch(const RunConfig& cfg);

// Algebra shorthand: "M<n>" or a full "blocks: [...]" spec.
TracialAlgebra algebra_from_spec(const std::string& text);

}  // namespace vna
