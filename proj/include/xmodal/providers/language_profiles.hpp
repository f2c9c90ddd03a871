// Copyright 2026 The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string_view>

// Sample text the Latin-script profiles are trained on. Plain prose and
// short scene descriptions, since that is what queries look like.

namespace xmodal::providers::detail {

struct ProfileCorpus {
    std::string_view lang;
    std::string_view text;
};

inline constexpr std::array kProfileCorpora = {
    ProfileCorpus{"en", R"(
a man riding a horse on the beach. a woman holding an umbrella in the rain. two dogs playing with a ball in the
park. a group of people standing around a table with food. the cat is sleeping on the couch next to the window.
a red bus driving down the street in the city. a young boy throwing a frisbee to his friend. a plate of pasta with
tomato sauce and cheese. the kitchen has white cabinets and a wooden floor. an elephant walking through the tall
grass. a person on a skateboard doing a trick at the skate park. there is a clock tower in the middle of the town.
a bowl of fruit sitting on the counter. a little girl brushing her teeth in the bathroom. the train is pulling into
the station while people wait on the platform. a giraffe eating leaves from the top of a tree. a surfer riding a
big wave in the ocean. a black and white photo of an old car parked outside a house. the sky was clear and the
mountains were covered with snow. she said that they would meet us at the restaurant after work. what is the
weather like today and where should we go for dinner. please show me pictures of the sunset over the lake. this
is the best thing that has ever happened to me. we have been waiting for the results of the test for three weeks.
the children were laughing while their parents watched from the bench. there are many birds flying over the
water near the bridge. how many people are sitting at the table in this picture. a large pizza with pepperoni and
mushrooms on a wooden board. a zebra grazing in a field of green grass. the motorcycle is parked next to a fence.
an airplane flying high above the clouds. a man and a woman walking their dog along the river. the room is
filled with books and there is a lamp on the desk. people are crossing the road at a busy intersection. a brown
teddy bear sitting on a bed with pillows. a baseball player swinging a bat at the ball. which of these images
shows a kitchen with a stove. i would like to know more about the history of this building. they went to the
market to buy vegetables, bread and some flowers for their mother. it was raining heavily when we arrived, so we
stayed inside and watched a movie. the old man is reading a newspaper while drinking coffee at the cafe. write a
short story about the animals in these images. can you tell me what is happening in the second picture. a
computer monitor and a keyboard on a desk near the window. a boat floating on a calm lake surrounded by trees.
some quiet sheep lying under a tree on a sunny afternoon. a striped cat resting beside a bicycle. several
fluffy clouds drifting above the hills. an empty bench under the bridge during the night. the bright lights of
the busy highway at dusk. a couple of kids running through the sprinklers in their yard. a shiny silver truck
with its lights on. the small puppy was chewing on a shoe while nobody was looking. why would anyone leave their
bags by the door? those buildings look taller than they really are. a woman wearing a hat and sunglasses is
talking on her phone. the bathroom sink is full of dirty dishes and cups.
)"},
    ProfileCorpus{"fr", R"(
un homme qui monte à cheval sur la plage. une femme tenant un parapluie sous la pluie. deux chiens jouent avec
un ballon dans le parc. un groupe de personnes debout autour d'une table avec de la nourriture. le chat dort sur
le canapé à côté de la fenêtre. un bus rouge qui roule dans la rue de la ville. un jeune garçon lance un frisbee
à son ami. une assiette de pâtes avec de la sauce tomate et du fromage. la cuisine a des placards blancs et un
sol en bois. un éléphant marche dans les hautes herbes. il y a une tour avec une horloge au milieu de la ville.
nous avons attendu les résultats pendant trois semaines. les enfants riaient pendant que leurs parents les
regardaient depuis le banc. quel temps fait-il aujourd'hui et où devrions-nous aller dîner. je voudrais en savoir
plus sur l'histoire de ce bâtiment. ils sont allés au marché pour acheter des légumes, du pain et des fleurs pour
leur mère. il pleuvait très fort quand nous sommes arrivés, alors nous sommes restés à l'intérieur. le vieil homme
lit le journal en buvant un café. pouvez-vous me dire ce qui se passe dans la deuxième image. un bateau sur un lac
calme entouré d'arbres. les montagnes étaient couvertes de neige et le ciel était bleu.
)"},
    ProfileCorpus{"de", R"(
ein mann reitet auf einem pferd am strand. eine frau hält einen regenschirm im regen. zwei hunde spielen mit
einem ball im park. eine gruppe von menschen steht um einen tisch mit essen. die katze schläft auf dem sofa neben
dem fenster. ein roter bus fährt durch die straße der stadt. ein junge wirft seinem freund eine frisbeescheibe zu.
ein teller nudeln mit tomatensoße und käse. die küche hat weiße schränke und einen holzboden. ein elefant läuft
durch das hohe gras. in der mitte der stadt steht ein uhrturm. wir haben drei wochen auf die ergebnisse gewartet.
die kinder lachten, während ihre eltern von der bank aus zusahen. wie ist das wetter heute und wo sollen wir zu
abend essen. ich möchte mehr über die geschichte dieses gebäudes erfahren. sie gingen auf den markt, um gemüse,
brot und blumen für ihre mutter zu kaufen. es regnete stark, als wir ankamen, deshalb blieben wir drinnen. der
alte mann liest die zeitung und trinkt dabei einen kaffee. kannst du mir sagen, was auf dem zweiten bild
passiert. ein boot auf einem ruhigen see, umgeben von bäumen. die berge waren mit schnee bedeckt.
)"},
    ProfileCorpus{"es", R"(
un hombre montando a caballo en la playa. una mujer sosteniendo un paraguas bajo la lluvia. dos perros jugando
con una pelota en el parque. un grupo de personas de pie alrededor de una mesa con comida. el gato está durmiendo
en el sofá junto a la ventana. un autobús rojo que circula por la calle de la ciudad. un niño lanzando un disco a
su amigo. un plato de pasta con salsa de tomate y queso. la cocina tiene armarios blancos y un suelo de madera. un
elefante caminando entre la hierba alta. hay una torre con un reloj en el centro del pueblo. hemos esperado los
resultados durante tres semanas. los niños se reían mientras sus padres los miraban desde el banco. qué tiempo hace
hoy y dónde deberíamos ir a cenar. me gustaría saber más sobre la historia de este edificio. fueron al mercado a
comprar verduras, pan y flores para su madre. llovía mucho cuando llegamos, así que nos quedamos dentro. el anciano
lee el periódico mientras toma un café. puedes decirme qué está pasando en la segunda imagen. un barco en un lago
tranquilo rodeado de árboles. las montañas estaban cubiertas de nieve.
)"},
    ProfileCorpus{"it", R"(
un uomo che cavalca un cavallo sulla spiaggia. una donna che tiene un ombrello sotto la pioggia. due cani che
giocano con una palla nel parco. un gruppo di persone in piedi intorno a un tavolo con del cibo. il gatto dorme sul
divano vicino alla finestra. un autobus rosso che percorre la strada della città. un ragazzo che lancia un frisbee
al suo amico. un piatto di pasta con salsa di pomodoro e formaggio. la cucina ha armadi bianchi e un pavimento di
legno. un elefante che cammina nell'erba alta. c'è una torre con l'orologio in mezzo al paese. abbiamo aspettato i
risultati per tre settimane. i bambini ridevano mentre i loro genitori li guardavano dalla panchina. che tempo fa
oggi e dove dovremmo andare a cena. vorrei sapere di più sulla storia di questo edificio. sono andati al mercato a
comprare verdure, pane e fiori per la loro madre. pioveva molto quando siamo arrivati, quindi siamo rimasti dentro.
il vecchio legge il giornale mentre beve un caffè. puoi dirmi cosa succede nella seconda immagine. una barca su un
lago tranquillo circondato da alberi. le montagne erano coperte di neve.
)"},
    ProfileCorpus{"pt", R"(
um homem andando a cavalo na praia. uma mulher segurando um guarda-chuva na chuva. dois cães brincando com uma
bola no parque. um grupo de pessoas em pé ao redor de uma mesa com comida. o gato está dormindo no sofá ao lado da
janela. um ônibus vermelho descendo a rua da cidade. um menino jogando um frisbee para o seu amigo. um prato de
macarrão com molho de tomate e queijo. a cozinha tem armários brancos e um piso de madeira. um elefante andando
pela grama alta. há uma torre com um relógio no meio da cidade. esperamos os resultados durante três semanas. as
crianças riam enquanto os pais as observavam do banco. como está o tempo hoje e onde devemos jantar. eu gostaria de
saber mais sobre a história deste prédio. eles foram ao mercado comprar legumes, pão e flores para a mãe. chovia
muito quando chegamos, então ficamos dentro de casa. o velho lê o jornal enquanto toma um café. você pode me dizer
o que está acontecendo na segunda imagem. um barco em um lago calmo cercado de árvores. as montanhas estavam
cobertas de neve.
)"},
    ProfileCorpus{"nl", R"(
een man die op een paard rijdt op het strand. een vrouw die een paraplu vasthoudt in de regen. twee honden spelen
met een bal in het park. een groep mensen staat rond een tafel met eten. de kat slaapt op de bank naast het raam.
een rode bus rijdt door de straat van de stad. een jongen gooit een frisbee naar zijn vriend. een bord pasta met
tomatensaus en kaas. de keuken heeft witte kasten en een houten vloer. een olifant loopt door het hoge gras. er
staat een klokkentoren in het midden van de stad. we hebben drie weken op de resultaten gewacht. de kinderen
lachten terwijl hun ouders vanaf de bank toekeken. wat voor weer is het vandaag en waar zullen we gaan eten. ik
zou graag meer willen weten over de geschiedenis van dit gebouw. ze gingen naar de markt om groenten, brood en
bloemen voor hun moeder te kopen. het regende hard toen we aankwamen, dus bleven we binnen. de oude man leest de
krant terwijl hij koffie drinkt. kun je me vertellen wat er op de tweede foto gebeurt. een boot op een rustig meer
omringd door bomen. de bergen waren bedekt met sneeuw.
)"},
};

}  // namespace xmodal::providers::detail
