//! CIE 1931 2 degree standard observer and CIE standard illuminant D65, tabulated at 5 nm.

/// (wavelength nm, x-bar, y-bar, z-bar), 360 nm to 830 nm.
pub static CIE1931_2DEG_5NM: [(f64, f64, f64, f64); 95] = [
    (360.0, 0.0001299, 3.917e-06, 0.0006061),
    (365.0, 0.0002321, 6.965e-06, 0.001086),
    (370.0, 0.0004149, 1.239e-05, 0.001946),
    (375.0, 0.0007416, 2.202e-05, 0.003486),
    (380.0, 0.001368, 3.9e-05, 0.006450001),
    (385.0, 0.002236, 6.4e-05, 0.01054999),
    (390.0, 0.004243, 0.00012, 0.02005001),
    (395.0, 0.00765, 0.000217, 0.03621),
    (400.0, 0.01431, 0.000396, 0.06785001),
    (405.0, 0.02319, 0.00064, 0.1102),
    (410.0, 0.04351, 0.00121, 0.2074),
    (415.0, 0.07763, 0.00218, 0.3713),
    (420.0, 0.13438, 0.004, 0.6456),
    (425.0, 0.21477, 0.0073, 1.03905),
    (430.0, 0.2839, 0.0116, 1.3856),
    (435.0, 0.3285, 0.01684, 1.62296),
    (440.0, 0.34828, 0.023, 1.74706),
    (445.0, 0.34806, 0.0298, 1.7826),
    (450.0, 0.3362, 0.038, 1.77211),
    (455.0, 0.3187, 0.048, 1.7441),
    (460.0, 0.2908, 0.06, 1.6692),
    (465.0, 0.2511, 0.0739, 1.5281),
    (470.0, 0.19536, 0.09098, 1.28764),
    (475.0, 0.1421, 0.1126, 1.0419),
    (480.0, 0.09564, 0.13902, 0.8129501),
    (485.0, 0.05795001, 0.1693, 0.6162),
    (490.0, 0.03201, 0.20802, 0.46518),
    (495.0, 0.0147, 0.2586, 0.3533),
    (500.0, 0.0049, 0.323, 0.272),
    (505.0, 0.0024, 0.4073, 0.2123),
    (510.0, 0.0093, 0.503, 0.1582),
    (515.0, 0.0291, 0.6082, 0.1117),
    (520.0, 0.06327, 0.71, 0.07824999),
    (525.0, 0.1096, 0.7932, 0.05725001),
    (530.0, 0.1655, 0.862, 0.04216),
    (535.0, 0.2257499, 0.9148501, 0.02984),
    (540.0, 0.2904, 0.954, 0.0203),
    (545.0, 0.3597, 0.9803, 0.0134),
    (550.0, 0.4334499, 0.9949501, 0.008749999),
    (555.0, 0.5120501, 1.0, 0.005749999),
    (560.0, 0.5945, 0.995, 0.0039),
    (565.0, 0.6784, 0.9786, 0.002749999),
    (570.0, 0.7621, 0.952, 0.0021),
    (575.0, 0.8425, 0.9154, 0.0018),
    (580.0, 0.9163, 0.87, 0.001650001),
    (585.0, 0.9786, 0.8163, 0.0014),
    (590.0, 1.0263, 0.757, 0.0011),
    (595.0, 1.0567, 0.6949, 0.001),
    (600.0, 1.0622, 0.631, 0.0008),
    (605.0, 1.0456, 0.5668, 0.0006),
    (610.0, 1.0026, 0.503, 0.00034),
    (615.0, 0.9384, 0.4412, 0.00024),
    (620.0, 0.8544499, 0.381, 0.00019),
    (625.0, 0.7514, 0.321, 0.0001),
    (630.0, 0.6424, 0.265, 4.999999e-05),
    (635.0, 0.5419, 0.217, 3e-05),
    (640.0, 0.4479, 0.175, 2e-05),
    (645.0, 0.3608, 0.1382, 1e-05),
    (650.0, 0.2835, 0.107, 0.0),
    (655.0, 0.2187, 0.0816, 0.0),
    (660.0, 0.1649, 0.061, 0.0),
    (665.0, 0.1212, 0.04458, 0.0),
    (670.0, 0.0874, 0.032, 0.0),
    (675.0, 0.0636, 0.0232, 0.0),
    (680.0, 0.04677, 0.017, 0.0),
    (685.0, 0.0329, 0.01192, 0.0),
    (690.0, 0.0227, 0.00821, 0.0),
    (695.0, 0.01584, 0.005723, 0.0),
    (700.0, 0.01135916, 0.004102, 0.0),
    (705.0, 0.008110916, 0.002929, 0.0),
    (710.0, 0.005790346, 0.002091, 0.0),
    (715.0, 0.004109457, 0.001484, 0.0),
    (720.0, 0.002899327, 0.001047, 0.0),
    (725.0, 0.00204919, 0.00074, 0.0),
    (730.0, 0.001439971, 0.00052, 0.0),
    (735.0, 0.0009999493, 0.0003611, 0.0),
    (740.0, 0.0006900786, 0.0002492, 0.0),
    (745.0, 0.0004760213, 0.0001719, 0.0),
    (750.0, 0.0003323011, 0.00012, 0.0),
    (755.0, 0.0002348261, 8.48e-05, 0.0),
    (760.0, 0.0001661505, 6e-05, 0.0),
    (765.0, 0.000117413, 4.24e-05, 0.0),
    (770.0, 8.307527e-05, 3e-05, 0.0),
    (775.0, 5.870652e-05, 2.12e-05, 0.0),
    (780.0, 4.150994e-05, 1.499e-05, 0.0),
    (785.0, 2.935326e-05, 1.06e-05, 0.0),
    (790.0, 2.067383e-05, 7.4657e-06, 0.0),
    (795.0, 1.455977e-05, 5.2578e-06, 0.0),
    (800.0, 1.025398e-05, 3.7029e-06, 0.0),
    (805.0, 7.221456e-06, 2.6078e-06, 0.0),
    (810.0, 5.085868e-06, 1.8366e-06, 0.0),
    (815.0, 3.581652e-06, 1.2934e-06, 0.0),
    (820.0, 2.522525e-06, 9.1093e-07, 0.0),
    (825.0, 1.776509e-06, 6.4153e-07, 0.0),
    (830.0, 1.251141e-06, 4.5181e-07, 0.0),
];

/// (wavelength nm, relative spectral power), 300 nm to 780 nm, normalized to 100 at 560 nm.
pub static D65_5NM: [(f64, f64); 97] = [
    (300.0, 0.0341),
    (305.0, 1.6643),
    (310.0, 3.2945),
    (315.0, 11.7652),
    (320.0, 20.236),
    (325.0, 28.6447),
    (330.0, 37.0535),
    (335.0, 38.5011),
    (340.0, 39.9488),
    (345.0, 42.4302),
    (350.0, 44.9117),
    (355.0, 45.775),
    (360.0, 46.6383),
    (365.0, 49.3637),
    (370.0, 52.0891),
    (375.0, 51.0323),
    (380.0, 49.9755),
    (385.0, 52.3118),
    (390.0, 54.6482),
    (395.0, 68.7015),
    (400.0, 82.7549),
    (405.0, 87.1204),
    (410.0, 91.486),
    (415.0, 92.4589),
    (420.0, 93.4318),
    (425.0, 90.057),
    (430.0, 86.6823),
    (435.0, 95.7736),
    (440.0, 104.865),
    (445.0, 110.936),
    (450.0, 117.008),
    (455.0, 117.41),
    (460.0, 117.812),
    (465.0, 116.336),
    (470.0, 114.861),
    (475.0, 115.392),
    (480.0, 115.923),
    (485.0, 112.367),
    (490.0, 108.811),
    (495.0, 109.082),
    (500.0, 109.354),
    (505.0, 108.578),
    (510.0, 107.802),
    (515.0, 106.296),
    (520.0, 104.79),
    (525.0, 106.239),
    (530.0, 107.689),
    (535.0, 106.047),
    (540.0, 104.405),
    (545.0, 104.225),
    (550.0, 104.046),
    (555.0, 102.023),
    (560.0, 100.0),
    (565.0, 98.1671),
    (570.0, 96.3342),
    (575.0, 96.0611),
    (580.0, 95.788),
    (585.0, 92.2368),
    (590.0, 88.6856),
    (595.0, 89.3459),
    (600.0, 90.0062),
    (605.0, 89.8026),
    (610.0, 89.5991),
    (615.0, 88.6489),
    (620.0, 87.6987),
    (625.0, 85.4936),
    (630.0, 83.2886),
    (635.0, 83.4939),
    (640.0, 83.6992),
    (645.0, 81.863),
    (650.0, 80.0268),
    (655.0, 80.1207),
    (660.0, 80.2146),
    (665.0, 81.2462),
    (670.0, 82.2778),
    (675.0, 80.281),
    (680.0, 78.2842),
    (685.0, 74.0027),
    (690.0, 69.7213),
    (695.0, 70.6652),
    (700.0, 71.6091),
    (705.0, 72.979),
    (710.0, 74.349),
    (715.0, 67.9765),
    (720.0, 61.604),
    (725.0, 65.7448),
    (730.0, 69.8856),
    (735.0, 72.4863),
    (740.0, 75.087),
    (745.0, 69.3398),
    (750.0, 63.5927),
    (755.0, 55.0054),
    (760.0, 46.4182),
    (765.0, 56.6118),
    (770.0, 66.8054),
    (775.0, 65.0941),
    (780.0, 63.3828),
];
