#pragma once

// Generated by tools/oracles.py (mpmath, 30 digits).
inline constexpr double kGammaArgs[] = {0.5, 1.0, 2.5, 7.25, 0.1, -0.5, -2.7, 12.0};
inline constexpr double kGamma[] = {
    1.772453850905516,
    1.0,
    1.329340388179137,
    1155.3810139199897,
    9.5135076986687313,
    -3.5449077018110321,
    -0.93108278483896397,
    39916800.0,
};
inline constexpr double kBesselArgs[][2] = {{0.0, 0.1}, {0.0, 5.0}, {0.5, 1.0}, {1.3, 12.5}, {2.5, 30.0}, {-0.3, 2.0}, {-0.5, 80.0}, {3.0, 60.0}};
inline constexpr double kBesselJ[] = {
    0.99750156206604003,
    -0.1775967713143383,
    0.67139670714180309,
    -0.2157373207566773,
    0.14120285879928212,
    -0.043847077073278784,
    -0.0098472271924440577,
    -0.040396711521655157,
};
inline constexpr double kBesselIArgs[][2] = {{0.0, 0.1}, {1.0, 5.0}, {0.5, 1.0}, {1.3, 12.5}, {2.5, 29.0}, {-0.3, 2.0}, {0.0, 45.0}, {3.0, 60.0}};
inline constexpr double kBesselI[] = {
    1.0025015629340956,
    24.335642142450527,
    0.93767488824548765,
    28513.702141337885,
    262150642085.21074,
    2.2374012335988941,
    2083414075177314800.0,
    5464801454879571500000000.0,
};
inline constexpr double kHardEdgeX[] = {1.0, 4.0, 10.0, 20.0};
inline constexpr double kHardEdgeA1[] = {
    0.98601309701324964,
    0.83861256712602582,
    0.45734660462101226,
    0.1149344030981746,
};
inline constexpr double kTauAt1p5[] = {
    4.2421583023715494,
    4.4573728534219459,
    1.1642597461075704,
    0.98583831163380071,
};
inline constexpr double kFredholmLogE[] = {
    -0.66344587376808992,
    -1.7706787098015303,
    -5.6557568457639415,
    -11.92784379052273,
    -0.32924941899719674,
    -1.1114621594946932,
    -4.2800996770802054,
    -9.8002951545866434,
    -0.15978032296166011,
    -0.69210102876043981,
    -3.2340904302241921,
    -8.0545677708362633,
    -0.033148493175178049,
    -0.25095308819264881,
    -1.7989551473423715,
    -5.377627284975872,
    -0.000097086918503331882,
    -0.0053929096869923622,
    -0.21107653399890443,
    -1.3148205193706922,
};
