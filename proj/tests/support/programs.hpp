#pragma once

#include <string>

namespace fbd::testdata {

inline const std::string program_p = R"(int P(int x, int y) {
  if (x >= 0)
    a = x;
  else
    a = -x;
  if (y < 5)
    b = a + 1;
  else
    b = a + 2;
  assert(b <= a);
}
)";

inline const std::string diamond = R"(int D(int x) {
  v = x;
  if (x > 0)
    v = v + 1;
  else
    v = v - 1;
  w = v + x;
  assert(w >= 0);
}
)";

inline const std::string counting_loop = R"(int L(int n) {
  i = 0;
  while (i < n)
    i = i + 1;
  assert(i == n);
}
)";

}  // namespace fbd::testdata
