//! Word pools for the synthetic corpus and for surrogate sampling.

pub const HOSPITAL_HEADS: &[&str] = &[
    "Hospital",
    "Hospital Universitario",
    "Hospital General",
    "Hospital Clínico",
    "Clínica",
    "Centro de Salud",
    "Policlínica",
    "Complejo Hospitalario",
    "Hospital Comarcal",
    "Centro Médico",
];

pub const HOSPITAL_NAMES: &[&str] = &[
    "San Rafael",
    "La Paz",
    "Virgen del Rocío",
    "Marseille",
    "Santa Lucía",
    "Doce de Octubre",
    "Ramón y Cajal",
    "La Fe",
    "Gregorio Marañón",
    "Puerta de Hierro",
    "San Juan",
    "Reina Sofía",
    "Virgen de la Arrixaca",
    "Miguel Servet",
    "Son Espases",
    "Cruces",
    "Basurto",
    "Valle de Hebrón",
    "Bellvitge",
    "Sant Pau",
    "Carlos Haya",
    "Virgen Macarena",
    "Príncipe de Asturias",
    "Severo Ochoa",
    "Infanta Elena",
    "Infanta Cristina",
    "Santa Bárbara",
    "San Pedro",
    "Los Arcos",
    "El Bierzo",
    "Costa del Sol",
    "Torrecárdenas",
    "San Cecilio",
    "Virgen de las Nieves",
    "Nuestra Señora de Sonsoles",
    "Río Hortega",
    "Montecelo",
    "Xeral",
    "Arnau de Vilanova",
    "Santa Tecla",
    "Mutua Terrassa",
    "Quirón",
    "Sanitas La Moraleja",
    "Rosaleda",
    "Alcorcón",
    "Fuenlabrada",
    "Móstoles",
    "Getafe",
    "El Tomillar",
    "Las Palmas",
    "Candelaria",
    "Insular",
    "Dr Negrín",
    "Vall d'Hebron",
    "Parc Taulí",
    "Germans Trias",
    "San Jorge",
    "Royo Villanova",
    "Obispo Polanco",
    "Nuestra Señora del Prado",
];

pub const LOCATIONS: &[&str] = &[
    "Madrid",
    "Barcelona",
    "Valencia",
    "Sevilla",
    "Zaragoza",
    "Málaga",
    "Murcia",
    "Palma",
    "Bilbao",
    "Alicante",
    "Córdoba",
    "Valladolid",
    "Vigo",
    "Gijón",
    "Granada",
    "Elche",
    "Oviedo",
    "Badalona",
    "Cartagena",
    "Terrassa",
    "Jerez de la Frontera",
    "Sabadell",
    "Móstoles",
    "Almería",
    "Pamplona",
    "Santander",
    "Castellón",
    "Burgos",
    "Albacete",
    "Getafe",
    "Salamanca",
    "Logroño",
    "Huelva",
    "Badajoz",
    "Tarragona",
    "León",
    "Cádiz",
    "Lleida",
    "Jaén",
    "Ourense",
    "Girona",
    "Lugo",
    "Cáceres",
    "Melilla",
    "Ceuta",
    "Guadalajara",
    "Toledo",
    "Pontevedra",
    "Palencia",
    "Ciudad Real",
    "Zamora",
    "Ávila",
    "Cuenca",
    "Huesca",
    "Segovia",
    "Soria",
    "Teruel",
    "Aranjuez",
    "Ponferrada",
    "Benidorm",
    "Torrevieja",
    "Marbella",
    "Estepona",
    "Alcalá de Henares",
    "Talavera de la Reina",
    "Mérida",
    "Linares",
    "Motril",
    "Lorca",
    "Manresa",
    "Reus",
    "Ferrol",
    "Irún",
    "Getxo",
    "Colombia",
    "Marruecos",
    "Rumanía",
    "Ecuador",
    "Perú",
    "Argentina",
];

pub const JOBS: &[&str] = &[
    "profesor",
    "profesora",
    "albañil",
    "enfermera",
    "enfermero",
    "camionero",
    "agricultor",
    "ganadero",
    "electricista",
    "fontanero",
    "carpintero",
    "abogado",
    "abogada",
    "ingeniero",
    "arquitecta",
    "administrativa",
    "administrativo",
    "cocinero",
    "camarera",
    "camarero",
    "pescador",
    "minero",
    "peluquera",
    "dependienta",
    "conductor de autobús",
    "jardinero",
    "mecánico",
    "policía",
    "bombero",
    "panadero",
    "pintor",
    "soldador",
    "informático",
    "contable",
    "limpiadora",
    "cuidadora",
    "militar",
    "comercial",
    "farmacéutica",
    "veterinario",
    "periodista",
    "estudiante",
    "jubilado",
    "ama de casa",
    "taxista",
];

pub const KINSHIP: &[&str] = &[
    "madre", "padre", "hermano", "hermana", "hijo", "hija", "abuelo", "abuela", "tío", "tía", "primo", "prima",
    "esposa", "marido", "sobrino", "nieta",
];

pub const SEX: &[(&str, &str)] = &[
    ("una", "mujer"),
    ("un", "varón"),
    ("un", "hombre"),
];

pub const SEX_FIELD: &[&str] = &["femenino", "masculino", "mujer", "varón"];

pub const MONTHS: &[&str] = &[
    "enero",
    "febrero",
    "marzo",
    "abril",
    "mayo",
    "junio",
    "julio",
    "agosto",
    "septiembre",
    "octubre",
    "noviembre",
    "diciembre",
];

pub const NUMBER_WORDS: &[&str] = &[
    "veinte", "treinta", "cuarenta", "cincuenta", "sesenta", "setenta", "ochenta", "noventa",
];
