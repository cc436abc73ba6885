getProduction(java.lang.String) { 
 return productionsByName; }  
testJustifications() { 
 ; 
 org.jsoar.kernel.Production j = agent.getProductions() .getProduction("justification-1"); "<AssertPlaceHolder>"; 
}
