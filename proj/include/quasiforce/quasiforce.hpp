#pragma once

#include "quasiforce/catalog.hpp"
#include "quasiforce/counterexample.hpp"
#include "quasiforce/error.hpp"
#include "quasiforce/forcing.hpp"
#include "quasiforce/gadgets.hpp"
#include "quasiforce/graph.hpp"
#include "quasiforce/json_io.hpp"
#include "quasiforce/kernel.hpp"
#include "quasiforce/polynomial.hpp"
#include "quasiforce/quantum.hpp"
#include "quasiforce/rational.hpp"
#include "quasiforce/rng.hpp"
#include "quasiforce/sbm.hpp"
