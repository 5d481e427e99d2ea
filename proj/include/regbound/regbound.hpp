#pragma once

#include "adversarial.hpp"
#include "bounds.hpp"
#include "conditional.hpp"
#include "counterexamples.hpp"
#include "datagen.hpp"
#include "distributions.hpp"
#include "error.hpp"
#include "fuzz.hpp"
#include "io.hpp"
#include "lemmas.hpp"
#include "losses.hpp"
#include "minimize.hpp"
#include "parallel.hpp"
