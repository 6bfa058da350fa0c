#include <cstdio>

int main() {
  std::puts("perwave: placeholder");
  return 0;
}
