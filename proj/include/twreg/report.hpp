#pragma once

#include <string>
#include <vector>

namespace twreg {

// Result of checking one identity coefficientwise on a window.
struct VerificationReport {
  std::string identity;
  std::string params;
  std::string window;
  bool pass = true;
  long long checked = 0;
  std::string failure;  // first offending coefficient, empty on pass

  void fail(const std::string& why) {
    if (pass) failure = why;
    pass = false;
  }
  void absorb(const VerificationReport& o) {
    checked += o.checked;
    if (!o.pass) fail(o.params.empty() ? o.failure : o.params + ": " + o.failure);
  }
};

}  // namespace twreg
