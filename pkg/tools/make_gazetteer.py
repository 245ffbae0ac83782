#!/usr/bin/env python3
"""Regenerate the bundled gazetteer CSVs.

Patterns are case-insensitive substrings applied first-match-wins; emitting
them sorted by length descending (then alphabetically) puts the more
specific patterns first, which resolves most containment clashes
("indiana" before "india", "new york" before "york").  Genuinely ambiguous
names (Georgia, Punjab, Birmingham) get a single documented choice; the
matcher makes no further disambiguation attempt.

Usage: python tools/make_gazetteer.py
"""

import csv
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "aquasift" / "data"

REGIONS = {
    "America": [
        "USA", "Canada", "Mexico", "Brazil", "Argentina", "Chile", "Peru",
        "Colombia", "Venezuela", "Ecuador", "Bolivia", "Paraguay", "Uruguay",
        "Guyana", "Suriname", "Panama", "Costa Rica", "Nicaragua", "Honduras",
        "El Salvador", "Guatemala", "Belize", "Cuba", "Jamaica", "Haiti",
        "Dominican Republic", "Trinidad and Tobago", "Bahamas", "Barbados",
        "Grenada",
    ],
    "Europe": [
        "United Kingdom", "Ireland", "France", "Germany", "Spain", "Portugal",
        "Italy", "Netherlands", "Belgium", "Luxembourg", "Switzerland",
        "Austria", "Denmark", "Sweden", "Norway", "Finland", "Iceland",
        "Poland", "Czechia", "Slovakia", "Hungary", "Romania", "Bulgaria",
        "Greece", "Croatia", "Serbia", "Bosnia and Herzegovina", "Slovenia",
        "North Macedonia", "Albania", "Montenegro", "Kosovo", "Ukraine",
        "Belarus", "Russia", "Moldova", "Lithuania", "Latvia", "Estonia",
        "Malta", "Cyprus",
    ],
    "Asia": [
        "China", "India", "Pakistan", "Bangladesh", "Sri Lanka", "Nepal",
        "Bhutan", "Maldives", "Afghanistan", "Iran", "Iraq", "Turkey",
        "Syria", "Lebanon", "Israel", "Palestine", "Jordan", "Saudi Arabia",
        "United Arab Emirates", "Qatar", "Kuwait", "Bahrain", "Oman",
        "Yemen", "Japan", "South Korea", "North Korea", "Taiwan", "Mongolia",
        "Kazakhstan", "Uzbekistan", "Turkmenistan", "Kyrgyzstan",
        "Tajikistan", "Thailand", "Vietnam", "Laos", "Cambodia", "Myanmar",
        "Malaysia", "Singapore", "Indonesia", "Philippines", "Brunei",
        "Timor-Leste", "Georgia", "Armenia", "Azerbaijan",
    ],
    "Africa": [
        "Egypt", "Libya", "Tunisia", "Algeria", "Morocco", "Sudan",
        "South Sudan", "Ethiopia", "Eritrea", "Djibouti", "Somalia", "Kenya",
        "Uganda", "Tanzania", "Rwanda", "Burundi",
        "Democratic Republic of the Congo", "Republic of the Congo",
        "Central African Republic", "Cameroon", "Nigeria", "Niger", "Chad",
        "Mali", "Burkina Faso", "Senegal", "Gambia", "Guinea",
        "Sierra Leone", "Liberia", "Ivory Coast", "Ghana", "Togo", "Benin",
        "South Africa", "Namibia", "Botswana", "Zimbabwe", "Zambia",
        "Malawi", "Mozambique", "Angola", "Madagascar", "Mauritius",
        "Seychelles", "Lesotho", "Eswatini", "Gabon", "Equatorial Guinea",
        "Mauritania", "Cape Verde",
    ],
    "Oceania": [
        "Australia", "New Zealand", "Fiji", "Papua New Guinea", "Samoa",
        "Tonga", "Vanuatu", "Solomon Islands", "Micronesia", "Palau",
        "Kiribati",
    ],
}

US_STATES = {
    "alabama": "AL", "alaska": "AK", "arizona": "AZ", "arkansas": "AR",
    "california": "CA", "colorado": "CO", "connecticut": "CT",
    "delaware": "DE", "florida": "FL", "georgia": "GA", "hawaii": "HI",
    "idaho": "ID", "illinois": "IL", "indiana": "IN", "iowa": "IA",
    "kansas": "KS", "kentucky": "KY", "louisiana": "LA", "maine": "ME",
    "maryland": "MD", "massachusetts": "MA", "michigan": "MI",
    "minnesota": "MN", "mississippi": "MS", "missouri": "MO",
    "montana": "MT", "nebraska": "NE", "nevada": "NV",
    "new hampshire": "NH", "new jersey": "NJ", "new mexico": "NM",
    "new york": "NY", "north carolina": "NC", "north dakota": "ND",
    "ohio": "OH", "oklahoma": "OK", "oregon": "OR", "pennsylvania": "PA",
    "rhode island": "RI", "south carolina": "SC", "south dakota": "SD",
    "tennessee": "TN", "texas": "TX", "utah": "UT", "vermont": "VT",
    "virginia": "VA", "washington": "WA", "west virginia": "WV",
    "wisconsin": "WI", "wyoming": "WY",
}

US_CITIES = [
    "los angeles", "san francisco", "san diego", "san jose", "san antonio",
    "new york city", "nyc", "brooklyn", "manhattan", "chicago", "houston",
    "dallas", "austin", "seattle", "boston", "miami", "atlanta", "denver",
    "phoenix", "philadelphia", "detroit", "portland", "las vegas",
    "washington dc", "washington, d.c.", "minneapolis", "baltimore",
    "pittsburgh", "malibu", "orlando", "tampa", "sacramento",
]

CA_PROVINCES = [
    "ontario", "quebec", "british columbia", "alberta", "manitoba",
    "saskatchewan", "nova scotia", "new brunswick", "newfoundland",
    "prince edward island", "yukon", "northwest territories", "nunavut",
]
CA_CITIES = ["toronto", "vancouver", "montreal", "ottawa", "calgary",
             "edmonton", "winnipeg", "halifax"]
CA_ABBREVS = ["on", "bc", "ab", "qc", "mb", "sk", "ns", "nb", "nl", "pe"]

AU_STATES = [
    "new south wales", "queensland", "victoria", "tasmania",
    "south australia", "western australia", "northern territory",
    "australian capital territory",
]
AU_CITIES = ["sydney", "melbourne", "brisbane", "perth", "adelaide",
             "canberra", "hobart", "darwin", "gold coast"]
AU_ABBREVS = ["nsw", "qld", "vic", "tas", "act", "nt"]

UK_PLACES = [
    "england", "scotland", "wales", "northern ireland", "great britain",
    "britain", "london", "manchester", "birmingham", "glasgow", "edinburgh",
    "liverpool", "leeds", "bristol", "sheffield", "cardiff", "belfast",
    "newcastle", "nottingham", "oxford", "cambridge", "york",
]

WORLD_CITIES = {
    "tokyo": "Japan", "osaka": "Japan", "kyoto": "Japan",
    "beijing": "China", "shanghai": "China", "shenzhen": "China",
    "guangzhou": "China", "hong kong": "China",
    "paris": "France", "lyon": "France", "marseille": "France",
    "berlin": "Germany", "munich": "Germany", "hamburg": "Germany",
    "frankfurt": "Germany", "cologne": "Germany",
    "madrid": "Spain", "barcelona": "Spain", "valencia": "Spain",
    "seville": "Spain",
    "rome": "Italy", "milan": "Italy", "naples": "Italy", "turin": "Italy",
    "moscow": "Russia", "saint petersburg": "Russia",
    "istanbul": "Turkey", "ankara": "Turkey", "izmir": "Turkey",
    "cairo": "Egypt", "alexandria": "Egypt", "giza": "Egypt",
    "lagos": "Nigeria", "abuja": "Nigeria", "kano": "Nigeria",
    "nairobi": "Kenya", "mombasa": "Kenya",
    "dhaka": "Bangladesh", "chittagong": "Bangladesh",
    "jakarta": "Indonesia", "surabaya": "Indonesia", "bali": "Indonesia",
    "manila": "Philippines", "cebu": "Philippines",
    "bangkok": "Thailand", "chiang mai": "Thailand",
    "kuala lumpur": "Malaysia", "penang": "Malaysia",
    "hanoi": "Vietnam", "ho chi minh": "Vietnam", "saigon": "Vietnam",
    "dubai": "United Arab Emirates", "abu dhabi": "United Arab Emirates",
    "sharjah": "United Arab Emirates",
    "riyadh": "Saudi Arabia", "jeddah": "Saudi Arabia",
    "doha": "Qatar", "muscat": "Oman", "amman": "Jordan",
    "beirut": "Lebanon", "damascus": "Syria", "baghdad": "Iraq",
    "tehran": "Iran", "kabul": "Afghanistan",
    "tel aviv": "Israel", "jerusalem": "Israel",
    "buenos aires": "Argentina", "cordoba": "Argentina",
    "sao paulo": "Brazil", "rio de janeiro": "Brazil",
    "brasilia": "Brazil", "salvador": "Brazil",
    "mexico city": "Mexico", "guadalajara": "Mexico", "monterrey": "Mexico",
    "lima": "Peru", "bogota": "Colombia", "medellin": "Colombia",
    "santiago": "Chile", "caracas": "Venezuela", "quito": "Ecuador",
    "la paz": "Bolivia", "montevideo": "Uruguay",
    "auckland": "New Zealand", "wellington": "New Zealand",
    "christchurch": "New Zealand",
    "dublin": "Ireland", "cork": "Ireland", "galway": "Ireland",
    "amsterdam": "Netherlands", "rotterdam": "Netherlands",
    "the hague": "Netherlands",
    "brussels": "Belgium", "antwerp": "Belgium",
    "stockholm": "Sweden", "gothenburg": "Sweden",
    "oslo": "Norway", "bergen": "Norway",
    "copenhagen": "Denmark", "helsinki": "Finland",
    "vienna": "Austria", "zurich": "Switzerland", "geneva": "Switzerland",
    "lisbon": "Portugal", "porto": "Portugal",
    "athens": "Greece", "thessaloniki": "Greece",
    "warsaw": "Poland", "krakow": "Poland",
    "prague": "Czechia", "budapest": "Hungary", "bucharest": "Romania",
    "sofia": "Bulgaria", "belgrade": "Serbia", "zagreb": "Croatia",
    "kyiv": "Ukraine", "kiev": "Ukraine", "lviv": "Ukraine",
    "minsk": "Belarus", "reykjavik": "Iceland",
    "seoul": "South Korea", "busan": "South Korea",
    "taipei": "Taiwan", "kaohsiung": "Taiwan",
    "colombo": "Sri Lanka", "kathmandu": "Nepal", "thimphu": "Bhutan",
    "male": "Maldives", "tashkent": "Uzbekistan", "almaty": "Kazakhstan",
    "accra": "Ghana", "kumasi": "Ghana",
    "addis ababa": "Ethiopia", "kampala": "Uganda",
    "dar es salaam": "Tanzania", "dodoma": "Tanzania",
    "kigali": "Rwanda", "harare": "Zimbabwe", "lusaka": "Zambia",
    "cape town": "South Africa", "johannesburg": "South Africa",
    "durban": "South Africa", "pretoria": "South Africa",
    "soweto": "South Africa",
    "casablanca": "Morocco", "rabat": "Morocco", "marrakech": "Morocco",
    "tunis": "Tunisia", "algiers": "Algeria", "tripoli": "Libya",
    "khartoum": "Sudan", "mogadishu": "Somalia", "dakar": "Senegal",
    "abidjan": "Ivory Coast", "bamako": "Mali",
    "kinshasa": "Democratic Republic of the Congo",
    "luanda": "Angola", "maputo": "Mozambique",
    "antananarivo": "Madagascar", "gaborone": "Botswana",
    "windhoek": "Namibia", "port moresby": "Papua New Guinea",
    "suva": "Fiji", "havana": "Cuba", "kingston": "Jamaica",
    "port-au-prince": "Haiti", "santo domingo": "Dominican Republic",
    "panama city": "Panama", "san salvador": "El Salvador",
    "tegucigalpa": "Honduras", "managua": "Nicaragua",
    "guatemala city": "Guatemala", "tbilisi": "Georgia",
    "yerevan": "Armenia", "baku": "Azerbaijan",
}

IN_PLACES = [
    "mumbai", "delhi", "new delhi", "bangalore", "bengaluru", "kolkata",
    "chennai", "hyderabad", "pune", "ahmedabad", "jaipur", "lucknow",
    "surat", "kanpur", "nagpur", "kerala", "tamil nadu", "maharashtra",
    "gujarat", "rajasthan", "west bengal", "uttar pradesh", "karnataka",
    "bihar", "odisha", "assam",
]
PK_PLACES = [
    "karachi", "lahore", "islamabad", "peshawar", "rawalpindi",
    "faisalabad", "multan", "quetta", "hyderabad, pakistan", "sindh",
    "balochistan", "khyber pakhtunkhwa", "gilgit",
]


def build_patterns():
    patterns = {}

    def add(pat, country):
        pat = pat.casefold()
        if pat not in patterns:
            patterns[pat] = country

    # most specific cross-border disambiguations first
    add("punjab, india", "India")
    add("punjab", "Pakistan")
    add("georgia, usa", "USA")
    add("victoria, bc", "Canada")
    add("london, ontario", "Canada")

    for city, country in WORLD_CITIES.items():
        add(city, country)
    for place in IN_PLACES:
        add(place, "India")
    for place in PK_PLACES:
        add(place, "Pakistan")
    for place in UK_PLACES:
        add(place, "United Kingdom")
    for state, abbrev in US_STATES.items():
        add(state, "USA")
        add(f", {abbrev.lower()}", "USA")
    for city in US_CITIES:
        add(city, "USA")
    for prov in CA_PROVINCES + CA_CITIES:
        add(prov, "Canada")
    for ab in CA_ABBREVS:
        add(f", {ab}", "Canada")
    for state in AU_STATES + AU_CITIES:
        add(state, "Australia")
    for ab in AU_ABBREVS:
        add(f", {ab}", "Australia")

    for region, countries in REGIONS.items():
        for country in countries:
            if country == "Georgia":  # bare name collides with the US state
                continue
            add(country, country)
    # aliases and short forms
    add("united states", "USA")
    add("u.s.a", "USA")
    add("u.s.", "USA")
    add("puerto rico", "USA")
    add("uae", "United Arab Emirates")
    add("uk", "United Kingdom")
    add("u.k", "United Kingdom")
    add("holland", "Netherlands")
    add("czech republic", "Czechia")
    add("burma", "Myanmar")
    add("ivory coast", "Ivory Coast")
    add("cote d'ivoire", "Ivory Coast")
    add("viet nam", "Vietnam")
    add("korea", "South Korea")
    add("deutschland", "Germany")
    add("espana", "Spain")
    return patterns


def main():
    patterns = build_patterns()
    regions = {c: r for r, cs in REGIONS.items() for c in cs}
    missing = sorted({c for c in patterns.values() if c not in regions})
    if missing:
        raise SystemExit(f"countries without a region: {missing}")

    ordered = sorted(patterns.items(), key=lambda kv: (-len(kv[0]), kv[0]))
    with open(DATA / "gazetteer_patterns.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pattern", "country"])
        writer.writerows(ordered)
    with open(DATA / "country_regions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "region"])
        writer.writerows(sorted(regions.items()))
    print(f"wrote {len(ordered)} patterns, {len(regions)} countries")


if __name__ == "__main__":
    main()
