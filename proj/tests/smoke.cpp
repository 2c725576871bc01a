#include "nilcircle/nilcircle.hpp"
int main() { return 0; }
