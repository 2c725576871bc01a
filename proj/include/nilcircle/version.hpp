#pragma once

#define NILCIRCLE_VERSION "0.1.0"
