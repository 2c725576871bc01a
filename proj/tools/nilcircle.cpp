// placeholder main while the library is brought up
#include "nilcircle/nilcircle.hpp"
#include <cstdio>
int main() {
    nilcircle::GroupShape s(2);
    auto g = nilcircle::moment_curve(nilcircle::Int(3), s);
    std::printf("%s\n", nilcircle::to_text(g).c_str());
    return 0;
}
