#include <cstdio>

int main() {
  std::fprintf(stderr, "polarfield: not implemented yet\n");
  return 2;
}
